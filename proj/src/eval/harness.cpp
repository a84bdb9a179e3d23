#include "shortcheck/eval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"
#include "shortcheck/decision/engine.hpp"

namespace shortcheck::eval {

namespace {

std::string signed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", std::abs(v));
    if (std::string(buf) == "0.000") return "0.000";
    return (v > 0 ? "+" : "-") + std::string(buf);
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

template <typename Fn>
std::vector<DatasetRecord> parse_lines(std::string_view text, Fn&& parse_one) {
    std::vector<DatasetRecord> out;
    std::size_t pos = 0, line_no = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;
        try {
            out.push_back(parse_one(Json::parse(line)));
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::Parse, "dataset line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, "dataset line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

} // namespace

void to_json(Json& j, const DatasetRecord& v) {
    j = Json{{"video_id", v.video_id}, {"gold_label", v.gold_label}, {"language", v.language}};
    if (v.signals) j["signals"] = *v.signals;
    if (v.media_path) j["media_path"] = *v.media_path;
}

void from_json(const Json& j, DatasetRecord& v) {
    v.video_id = j.at("video_id").get<std::string>();
    v.gold_label = j.at("gold_label").get<Label>();
    v.language = j.value("language", std::string());
    v.signals.reset();
    v.media_path.reset();
    if (j.contains("signals")) v.signals = j.at("signals").get<ModalitySignals>();
    if (j.contains("media_path")) v.media_path = j.at("media_path").get<std::string>();
    if (!v.signals && !v.media_path) {
        throw Error(ErrorCode::Parse, "record " + v.video_id + " has neither signals nor media_path");
    }
}

std::vector<DatasetRecord> parse_dataset(std::string_view text, const std::filesystem::path& base_dir) {
    return parse_lines(text, [&](const Json& j) {
        auto rec = j.get<DatasetRecord>();
        if (rec.media_path && !base_dir.empty() && std::filesystem::path(*rec.media_path).is_relative()) {
            rec.media_path = (base_dir / *rec.media_path).string();
        }
        return rec;
    });
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
    return parse_dataset(read_file(path), path.parent_path());
}

EvalReport run_eval(const std::vector<DatasetRecord>& dataset, const PipelineConfig& config,
                    const EvalOptions& options) {
    struct Outcome {
        std::optional<Prediction> prediction;
        std::optional<SkippedRecord> skipped;
    };
    std::vector<Outcome> outcomes(dataset.size());

    auto evaluate = [&](std::size_t i) {
        const auto& rec = dataset[i];
        auto& out = outcomes[i];
        try {
            CheckworthinessResult result;
            if (options.mode == EvalMode::fixture) {
                if (!rec.signals) {
                    out.skipped = SkippedRecord{rec.video_id, "no recorded signals"};
                    return;
                }
                result = decision::score(*rec.signals, config);
            } else {
                if (!rec.media_path) {
                    out.skipped = SkippedRecord{rec.video_id, "no media path"};
                    return;
                }
                if (!options.analyzer) throw Error(ErrorCode::InvalidConfig, "live mode needs an analyzer");
                result = options.analyzer(rec);
            }
            out.prediction = Prediction{rec.video_id, rec.gold_label, result.label, result.score};
        } catch (const std::exception& e) {
            out.skipped = SkippedRecord{rec.video_id, e.what()};
        }
    };

    const int workers = options.mode == EvalMode::live ? std::max(1, options.workers) : 1;
    if (workers == 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::future<void>> pool;
        for (int w = 0; w < workers; ++w) {
            pool.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next++; i < dataset.size(); i = next++) evaluate(i);
            }));
        }
        for (auto& f : pool) f.get();
    }

    std::vector<Prediction> predictions;
    std::vector<SkippedRecord> skipped;
    for (auto& o : outcomes) {
        if (o.prediction) predictions.push_back(std::move(*o.prediction));
        if (o.skipped) skipped.push_back(std::move(*o.skipped));
    }
    EvalReport report;
    if (!predictions.empty()) report = compute_metrics(std::move(predictions));
    report.name = options.name;
    report.skipped = std::move(skipped);
    return report;
}

MetricDelta delta(const EvalReport& a, const EvalReport& b) {
    MetricDelta d;
    d.precision = a.macro.precision - b.macro.precision;
    d.recall = a.macro.recall - b.macro.recall;
    d.accuracy = a.accuracy - b.accuracy;
    d.f1 = a.macro.f1 - b.macro.f1;
    d.weighted_f1 = a.weighted_f1 - b.weighted_f1;
    d.cw_precision = a.checkworthy.precision - b.checkworthy.precision;
    d.cw_recall = a.checkworthy.recall - b.checkworthy.recall;
    d.cw_f1 = a.checkworthy.f1 - b.checkworthy.f1;
    return d;
}

const std::vector<std::string>& default_ablation_modules() {
    static const std::vector<std::string> kModules{
        std::string(modules::kWeapon),   std::string(modules::kSummary),   std::string(modules::kTranscript),
        std::string(modules::kBuzzword), std::string(modules::kOcr),       std::string(modules::kFactCheck),
        std::string(modules::kDeepfake),
    };
    return kModules;
}

AblationTable run_ablation(const std::vector<DatasetRecord>& dataset, const PipelineConfig& config,
                           const std::vector<std::string>& modules) {
    for (const auto& m : modules) {
        if (!is_known_module(m)) throw Error(ErrorCode::UnknownModule, m);
    }
    AblationTable table;
    table.baseline = run_eval(dataset, config, EvalOptions{EvalMode::fixture, {}, 1, "baseline"});
    for (const auto& m : modules) {
        PipelineConfig ablated = config;
        ablated.module_enabled[m] = false;
        AblationRow row;
        row.removed = m;
        row.report = run_eval(dataset, ablated, EvalOptions{EvalMode::fixture, {}, 1, "without " + m});
        row.delta = delta(row.report, table.baseline);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string render_text(const AblationTable& t) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-14s %-7s %-7s %-7s %-7s %-7s\n", "removed", "P", "R", "Acc", "F1-W", "R(CW)");
    os << buf;
    for (const auto& r : t.rows) {
        const auto& d = r.delta;
        std::snprintf(buf, sizeof(buf), "%-14s %-7s %-7s %-7s %-7s %-7s\n", r.removed.c_str(), signed3(d.precision).c_str(),
                      signed3(d.recall).c_str(), signed3(d.accuracy).c_str(), signed3(d.f1).c_str(),
                      signed3(d.cw_recall).c_str());
        os << buf;
    }
    const auto& b = t.baseline;
    std::snprintf(buf, sizeof(buf), "%-14s %-7s %-7s %-7s %-7s %-7s\n", "all modules", fixed3(b.macro.precision).c_str(),
                  fixed3(b.macro.recall).c_str(), fixed3(b.accuracy).c_str(), fixed3(b.macro.f1).c_str(),
                  fixed3(b.checkworthy.recall).c_str());
    os << buf;
    return os.str();
}

std::string render_csv(const AblationTable& t) {
    std::ostringstream os;
    os << "removed,precision,recall,accuracy,f1,weighted_f1,cw_precision,cw_recall,cw_f1\n";
    const auto& b = t.baseline;
    os << "baseline," << fixed3(b.macro.precision) << "," << fixed3(b.macro.recall) << "," << fixed3(b.accuracy) << ","
       << fixed3(b.macro.f1) << "," << fixed3(b.weighted_f1) << "," << fixed3(b.checkworthy.precision) << ","
       << fixed3(b.checkworthy.recall) << "," << fixed3(b.checkworthy.f1) << "\n";
    for (const auto& r : t.rows) {
        const auto& d = r.delta;
        os << r.removed << "," << signed3(d.precision) << "," << signed3(d.recall) << "," << signed3(d.accuracy) << ","
           << signed3(d.f1) << "," << signed3(d.weighted_f1) << "," << signed3(d.cw_precision) << ","
           << signed3(d.cw_recall) << "," << signed3(d.cw_f1) << "\n";
    }
    return os.str();
}

std::vector<DeepfakeSample> load_deepfake_dataset(const std::filesystem::path& path) {
    const auto text = read_file(path);
    const auto base = path.parent_path();
    std::vector<DeepfakeSample> out;
    std::size_t pos = 0, line_no = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            const auto j = Json::parse(line);
            DeepfakeSample s;
            s.id = j.at("id").get<std::string>();
            const auto label = j.at("label").get<std::string>();
            if (label != "fake" && label != "real") throw Error(ErrorCode::Parse, "label must be fake or real");
            s.is_fake = label == "fake";
            for (const auto& f : j.at("frames")) {
                std::filesystem::path p = f.get<std::string>();
                s.frames.push_back(read_file(p.is_relative() ? base / p : p));
            }
            out.push_back(std::move(s));
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<DeepfakeRow> compare_deepfake_backends(const std::vector<DeepfakeSample>& dataset,
                                                   const std::vector<DeepfakeBackend>& backends, double trigger) {
    std::vector<DeepfakeRow> rows;
    for (const auto& backend : backends) {
        DeepfakeRow row;
        row.backend = backend.name;
        try {
            for (const auto& sample : dataset) {
                const auto score = backend.scorer(sample);
                const bool predicted_fake = score && *score >= trigger;
                ++row.confusion[sample.is_fake ? 0 : 1][predicted_fake ? 0 : 1];
            }
        } catch (const std::exception& e) {
            row.error = e.what();
            row.confusion = {};
            rows.push_back(std::move(row));
            continue;
        }
        const auto& c = row.confusion;
        const std::size_t tp = c[0][0], fn = c[0][1], fp = c[1][0], tn = c[1][1];
        row.n = tp + fn + fp + tn;
        const auto fake = class_metrics(tp, fp, fn);
        const auto real = class_metrics(tn, fn, fp);
        row.precision = fake.precision;
        row.recall = fake.recall;
        row.f1 = fake.f1;
        row.accuracy = row.n == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(row.n);
        row.weighted_f1 = row.n == 0 ? 0.0
                                     : (fake.f1 * static_cast<double>(tp + fn) + real.f1 * static_cast<double>(tn + fp)) /
                                           static_cast<double>(row.n);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_text(const std::vector<DeepfakeRow>& rows) {
    std::ostringstream os;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%-16s %-6s %-6s %-6s %-6s\n", "model", "A", "P", "R", "F1");
    os << buf;
    for (const auto& r : rows) {
        if (r.error) {
            os << r.backend << "  unavailable: " << *r.error << "\n";
            continue;
        }
        std::snprintf(buf, sizeof(buf), "%-16s %.3f  %.3f  %.3f  %.3f\n", r.backend.c_str(), r.accuracy, r.precision,
                      r.recall, r.f1);
        os << buf;
    }
    return os.str();
}

std::string render_csv(const std::vector<DeepfakeRow>& rows) {
    std::ostringstream os;
    os << "model,accuracy,precision,recall,f1,weighted_f1,n,error\n";
    for (const auto& r : rows) {
        os << r.backend << "," << fixed3(r.accuracy) << "," << fixed3(r.precision) << "," << fixed3(r.recall) << ","
           << fixed3(r.f1) << "," << fixed3(r.weighted_f1) << "," << r.n << "," << (r.error ? "unavailable" : "")
           << "\n";
    }
    return os.str();
}

} // namespace shortcheck::eval
