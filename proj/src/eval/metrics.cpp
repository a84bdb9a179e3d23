#include "shortcheck/eval/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "shortcheck/core/error.hpp"

namespace shortcheck::eval {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

void fill(EvalReport& r) {
    const auto& c = r.confusion;
    const std::size_t tp = c[0][0], fn = c[0][1], fp = c[1][0], tn = c[1][1];
    r.n = tp + fn + fp + tn;
    r.checkworthy = class_metrics(tp, fp, fn);
    r.checkworthy.support = tp + fn;
    // Mirror image: Not_Checkworthy as the positive class.
    r.not_checkworthy = class_metrics(tn, fn, fp);
    r.not_checkworthy.support = tn + fp;
    r.macro.precision = (r.checkworthy.precision + r.not_checkworthy.precision) / 2.0;
    r.macro.recall = (r.checkworthy.recall + r.not_checkworthy.recall) / 2.0;
    r.macro.f1 = (r.checkworthy.f1 + r.not_checkworthy.f1) / 2.0;
    r.macro.support = r.n;
    r.weighted_f1 = (r.checkworthy.f1 * static_cast<double>(r.checkworthy.support) +
                     r.not_checkworthy.f1 * static_cast<double>(r.not_checkworthy.support)) /
                    static_cast<double>(r.n);
    r.accuracy = ratio(tp + tn, r.n);
}

} // namespace

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
    ClassMetrics m;
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.f1 = (m.precision + m.recall) == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.support = tp + fn;
    return m;
}

EvalReport compute_metrics(std::span<const Label> golds, std::span<const Label> preds) {
    if (golds.size() != preds.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(golds.size()) + " gold labels vs " +
                                                   std::to_string(preds.size()) + " predictions");
    }
    if (golds.empty()) throw Error(ErrorCode::Empty, "no labels to evaluate");
    EvalReport r;
    for (std::size_t i = 0; i < golds.size(); ++i) ++r.confusion[index_of(golds[i])][index_of(preds[i])];
    fill(r);
    return r;
}

EvalReport compute_metrics(std::vector<Prediction> predictions) {
    if (predictions.empty()) throw Error(ErrorCode::Empty, "no predictions to evaluate");
    EvalReport r;
    for (const auto& p : predictions) ++r.confusion[index_of(p.gold)][index_of(p.pred)];
    fill(r);
    r.predictions = std::move(predictions);
    return r;
}

std::string render_text(const EvalReport& r) {
    std::ostringstream os;
    if (!r.name.empty()) os << "report: " << r.name << "\n";
    os << "records: " << r.n << " (skipped " << r.skipped.size() << ")\n";
    os << "class              P      R      F1     support\n";
    auto row = [&](const char* name, const ClassMetrics& m) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-17s  %.3f  %.3f  %.3f  %zu\n", name, m.precision, m.recall, m.f1, m.support);
        os << buf;
    };
    row("Checkworthy", r.checkworthy);
    row("Not_Checkworthy", r.not_checkworthy);
    row("macro", r.macro);
    os << "weighted F1        " << fixed3(r.weighted_f1) << "\n";
    os << "accuracy           " << fixed3(r.accuracy) << "\n";
    os << "confusion (rows gold, columns predicted)\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "                   CW     NCW\n  CW               %-6zu %zu\n  NCW              %-6zu %zu\n",
                  r.confusion[0][0], r.confusion[0][1], r.confusion[1][0], r.confusion[1][1]);
    os << buf;
    for (const auto& s : r.skipped) os << "skipped " << s.video_id << ": " << s.reason << "\n";
    return os.str();
}

std::string render_csv(const EvalReport& r) {
    std::ostringstream os;
    os << "scope,precision,recall,f1,support\n";
    auto row = [&](const char* name, const ClassMetrics& m) {
        os << name << "," << fixed3(m.precision) << "," << fixed3(m.recall) << "," << fixed3(m.f1) << "," << m.support
           << "\n";
    };
    row("Checkworthy", r.checkworthy);
    row("Not_Checkworthy", r.not_checkworthy);
    row("macro", r.macro);
    os << "weighted,,," << fixed3(r.weighted_f1) << "," << r.n << "\n";
    os << "accuracy,,,," << fixed3(r.accuracy) << "\n";
    return os.str();
}

void to_json(Json& j, const ClassMetrics& v) {
    j = Json{{"precision", v.precision}, {"recall", v.recall}, {"f1", v.f1}, {"support", v.support}};
}

void from_json(const Json& j, ClassMetrics& v) {
    v.precision = j.at("precision").get<double>();
    v.recall = j.at("recall").get<double>();
    v.f1 = j.at("f1").get<double>();
    v.support = j.at("support").get<std::size_t>();
}

void to_json(Json& j, const Prediction& v) {
    j = Json{{"video_id", v.video_id}, {"gold", v.gold}, {"pred", v.pred}};
    if (v.score) j["score"] = *v.score;
}

void from_json(const Json& j, Prediction& v) {
    v.video_id = j.at("video_id").get<std::string>();
    v.gold = j.at("gold").get<Label>();
    v.pred = j.at("pred").get<Label>();
    if (j.contains("score")) v.score = j.at("score").get<double>();
}

void to_json(Json& j, const SkippedRecord& v) { j = Json{{"video_id", v.video_id}, {"reason", v.reason}}; }

void from_json(const Json& j, SkippedRecord& v) {
    v.video_id = j.at("video_id").get<std::string>();
    v.reason = j.at("reason").get<std::string>();
}

void to_json(Json& j, const EvalReport& v) {
    j = Json{{"name", v.name},
             {"n", v.n},
             {"per_class", {{"Checkworthy", v.checkworthy}, {"Not_Checkworthy", v.not_checkworthy}}},
             {"macro", v.macro},
             {"weighted_f1", v.weighted_f1},
             {"accuracy", v.accuracy},
             {"confusion", {{"labels", {"Checkworthy", "Not_Checkworthy"}}, {"matrix", v.confusion}}},
             {"predictions", v.predictions},
             {"skipped", v.skipped}};
}

void from_json(const Json& j, EvalReport& v) {
    v.name = j.value("name", std::string());
    v.n = j.at("n").get<std::size_t>();
    v.checkworthy = j.at("per_class").at("Checkworthy").get<ClassMetrics>();
    v.not_checkworthy = j.at("per_class").at("Not_Checkworthy").get<ClassMetrics>();
    v.macro = j.at("macro").get<ClassMetrics>();
    v.weighted_f1 = j.at("weighted_f1").get<double>();
    v.accuracy = j.at("accuracy").get<double>();
    v.confusion = j.at("confusion").at("matrix").get<Confusion>();
    v.predictions = j.value("predictions", std::vector<Prediction>{});
    v.skipped = j.value("skipped", std::vector<SkippedRecord>{});
}

} // namespace shortcheck::eval
