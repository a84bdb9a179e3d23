#include "shortcheck/service/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "shortcheck/backends/clients.hpp"
#include "shortcheck/backends/mock_server.hpp"
#include "shortcheck/buzzword/detector.hpp"
#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"
#include "shortcheck/decision/engine.hpp"
#include "shortcheck/eval/harness.hpp"
#include "shortcheck/service/api.hpp"
#include "shortcheck/service/pipeline.hpp"

namespace shortcheck::service {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string config_path;
    bool fixture_mode = false;
    std::string fixture_dir;
    std::vector<std::string> disable;
    std::string output = "text";
    std::string store;
};

void check_modules(const std::vector<std::string>& names) {
    for (const auto& m : names) {
        if (!is_known_module(m)) throw UsageError("unknown module '" + m + "'");
    }
}

PipelineConfig build_config(const Globals& g, bool apply_disable = true) {
    PipelineConfig config = g.config_path.empty() ? default_config() : load_config(g.config_path);
    apply_environment(config);
    check_modules(g.disable);
    if (apply_disable) {
        for (const auto& m : g.disable) config.module_enabled[m] = false;
    }
    if (!g.store.empty()) config.store_dir = g.store;
    if (const auto problems = validate(config); !problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw UsageError(msg);
    }
    return config;
}

fs::path fixture_dir_for(const Globals& g, const std::string& source) {
    if (!g.fixture_dir.empty()) return g.fixture_dir;
    if (const char* env = std::getenv("SHORTCHECK_FIXTURE_DIR"); env && *env) return env;
    if (!source.empty()) {
        const fs::path beside = fs::path(source).parent_path() / "recorded";
        if (fs::is_directory(beside)) return beside;
    }
    return "fixtures/recorded";
}

// Starts the replay server and points every backend at it when --fixture-mode is on.
std::unique_ptr<backends::FixtureServer> maybe_fixture_server(const Globals& g, PipelineConfig& config,
                                                              const std::string& source) {
    if (!g.fixture_mode) return nullptr;
    const fs::path dir = fixture_dir_for(g, source);
    if (!fs::is_directory(dir)) throw UsageError("fixture directory not found: " + dir.string());
    auto server = std::make_unique<backends::FixtureServer>(dir);
    backends::point_endpoints_at(config, server->base_url());
    return server;
}

// SHORTCHECK_FROZEN_TIME pins created_at and zeroes module timings, so runs
// from different entry points can be compared byte for byte.
std::shared_ptr<const Clock> clock_from_environment() {
    const char* frozen = std::getenv("SHORTCHECK_FROZEN_TIME");
    if (frozen && *frozen) return std::make_shared<FrozenClock>(frozen);
    return nullptr;
}

std::string opt(const std::optional<std::string>& v) {
    return v ? *v : std::string("(absent)");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void print_record(const AnalyzeOutcome& outcome, const std::string& format, std::ostream& out) {
    const auto& r = outcome.record;
    const auto& s = r.signals;
    if (format == "json") {
        out << outcome.bytes << "\n";
        return;
    }
    char score_buf[32];
    std::snprintf(score_buf, sizeof(score_buf), "%g", r.result.score);
    std::string deepfake = "(absent)";
    if (s.deepfake_score) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", *s.deepfake_score);
        deepfake = buf;
    }
    const std::vector<std::pair<std::string, std::string>> fields = {
        {"video_id", r.video_id},
        {"config_digest", r.config_digest},
        {"cached", outcome.cached ? "yes" : "no"},
        {"overlay_text", opt(s.overlay_text)},
        {"transcript", opt(s.transcript)},
        {"transcript_lang", opt(s.transcript_lang)},
        {"video_summary", opt(s.video_summary)},
        {"buzzword_detected", s.buzzword_detected() ? "True" : "False"},
        {"transcript_verdict", std::string(to_string(s.transcript_verdict))},
        {"summary_verdict", std::string(to_string(s.summary_verdict))},
        {"overlay_verdict", std::string(to_string(s.overlay_verdict))},
        {"is_advertisement", s.is_advertisement ? "True" : "False"},
        {"deepfake_score", deepfake},
        {"claims", std::to_string(s.claim_results.size())},
        {"label", std::string(to_string(r.result.label))},
        {"score", score_buf},
    };
    if (format == "csv") {
        out << "field,value\n";
        for (const auto& [k, v] : fields) out << k << "," << csv_field(v) << "\n";
        for (const auto& [name, st] : r.modules) out << "module." << name << "," << to_string(st.status) << "\n";
        return;
    }
    for (const auto& [k, v] : fields) out << k << ": " << v << "\n";
    out << "modules:";
    for (const auto& [name, st] : r.modules) out << " " << name << "=" << to_string(st.status);
    out << "\n";
    for (const auto& [name, st] : r.modules) {
        if (st.error) out << "  " << name << " error: " << *st.error << "\n";
    }
    out << "\n" << decision::explain(r.result);
}

int cmd_analyze(const Globals& g, const std::string& source, const std::optional<std::string>& language,
                std::ostream& out) {
    PipelineConfig config = build_config(g);
    auto server = maybe_fixture_server(g, config, source);
    auto store = std::make_shared<Store>(config.store_dir);
    Pipeline pipeline(config, store, clock_from_environment());
    const auto outcome = pipeline.analyze(source, language);
    print_record(outcome, g.output, out);
    return kExitOk;
}

int cmd_eval(const Globals& g, const std::string& dataset_path, bool live, const std::string& name, bool save,
             double max_skipped, int workers, const std::string& predictions_path, std::ostream& out,
             std::ostream& err) {
    PipelineConfig config = build_config(g);
    const auto dataset = eval::load_dataset(dataset_path);
    std::unique_ptr<backends::FixtureServer> server;
    std::shared_ptr<Pipeline> pipeline;
    std::shared_ptr<Store> store;
    eval::EvalOptions options;
    options.name = name.empty() ? fs::path(dataset_path).stem().string() : name;
    if (live) {
        server = maybe_fixture_server(g, config, dataset_path);
        store = std::make_shared<Store>(config.store_dir);
        pipeline = std::make_shared<Pipeline>(config, store, clock_from_environment());
        options.mode = eval::EvalMode::live;
        options.workers = workers > 0 ? workers : config.workers;
        options.analyzer = [pipeline](const eval::DatasetRecord& rec) {
            std::optional<std::string> lang;
            if (!rec.language.empty()) lang = rec.language;
            return pipeline->analyze(*rec.media_path, lang).record.result;
        };
    }
    const auto report = eval::run_eval(dataset, config, options);

    if (g.output == "csv") {
        out << eval::render_csv(report);
    } else if (g.output == "json") {
        out << canonical_serialize(report) << "\n";
    } else {
        out << eval::render_text(report);
    }
    if (!predictions_path.empty()) {
        std::ofstream pf(predictions_path, std::ios::binary | std::ios::trunc);
        for (const auto& p : report.predictions) pf << canonical_serialize(p) << "\n";
        if (!pf) throw Error(ErrorCode::Io, "cannot write " + predictions_path);
    }
    if (save) {
        if (!store) store = std::make_shared<Store>(config.store_dir);
        const std::string id = options.name + "-" + sha256_hex(canonical_serialize(report)).substr(0, 12);
        store->put_report(id, report);
        err << "saved report " << id << "\n";
    }
    const std::size_t total = report.n + report.skipped.size();
    const double fraction = total == 0 ? 0.0 : static_cast<double>(report.skipped.size()) / static_cast<double>(total);
    if (report.n == 0) {
        err << "no record could be evaluated\n";
        return kExitFailure;
    }
    if (fraction > max_skipped) {
        err << report.skipped.size() << " of " << total << " records skipped, above the allowed fraction "
            << max_skipped << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_ablate(const Globals& g, const std::string& dataset_path, std::ostream& out) {
    const PipelineConfig config = build_config(g, false);
    const auto dataset = eval::load_dataset(dataset_path);
    const auto& modules = g.disable.empty() ? eval::default_ablation_modules() : g.disable;
    const auto table = eval::run_ablation(dataset, config, modules);
    out << (g.output == "csv" ? eval::render_csv(table) : eval::render_text(table));
    return kExitOk;
}

int cmd_deepfake_bench(const Globals& g, const std::string& dataset_path, const std::vector<std::string>& specs,
                       std::optional<double> trigger, std::ostream& out) {
    PipelineConfig config = build_config(g);
    auto server = maybe_fixture_server(g, config, dataset_path);
    const auto dataset = eval::load_deepfake_dataset(dataset_path);
    const BackendEndpoint base = config.endpoints.at(std::string(backend_names::kDeepfake));

    std::vector<eval::DeepfakeBackend> backends;
    auto add = [&](const std::string& model, const std::string& url) {
        BackendEndpoint ep = base;
        ep.model = model;
        if (!url.empty()) ep.base_url = url;
        backends.push_back(eval::DeepfakeBackend{model, [client = backends::BackendClient(ep)](
                                                            const eval::DeepfakeSample& sample) {
                                                     return backends::deepfake_score_images(client, sample.frames).score;
                                                 }});
    };
    if (specs.empty()) add(base.model, "");
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == 0) throw UsageError("--backend expects MODEL or MODEL=URL");
        add(spec.substr(0, eq), eq == std::string::npos ? std::string() : spec.substr(eq + 1));
    }
    const auto rows = eval::compare_deepfake_backends(dataset, backends, trigger.value_or(config.deepfake_trigger));
    out << (g.output == "csv" ? eval::render_csv(rows) : eval::render_text(rows));
    return kExitOk;
}

int cmd_lexicon_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    std::vector<buzzword::Lexicon> lexicons;
    try {
        lexicons = buzzword::load_lexicons(path);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kExitFailure;
    }
    const auto problems = buzzword::validate(lexicons);
    for (const auto& p : problems) err << path << ": " << p << "\n";
    if (!problems.empty()) return kExitFailure;
    std::size_t entries = 0;
    for (const auto& l : lexicons) entries += l.entries.size();
    out << path << ": ok, " << entries << " entries in " << lexicons.size() << " language(s)\n";
    return kExitOk;
}

int cmd_serve(const Globals& g, const std::string& host, int port, const std::string& static_dir, std::ostream& out) {
    PipelineConfig config = build_config(g);
    auto server = maybe_fixture_server(g, config, "");
    auto store = std::make_shared<Store>(config.store_dir);
    auto pipeline = std::make_shared<Pipeline>(config, store, clock_from_environment());
    ApiServer api(pipeline, ApiOptions{static_dir});
    const int bound = api.bind(host, port);
    if (bound <= 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    out << "listening on http://" << host << ":" << bound << std::endl;
    api.listen();
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Short-video checkworthiness triage", "shortcheck"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_flag("--fixture-mode", g.fixture_mode, "serve every backend from recorded fixtures");
    app.add_option("--fixture-dir", g.fixture_dir, "recorded fixture directory");
    app.add_option("--disable", g.disable, "module to disable (for ablate: module to remove)")->allow_extra_args(false);
    app.add_option("--output", g.output, "output format")->check(CLI::IsMember({"text", "csv", "json"}));
    app.add_option("--store", g.store, "store directory (overrides config)");

    std::string source;
    std::optional<std::string> language;
    auto* analyze = app.add_subcommand("analyze", "analyze one video and print the explanation");
    analyze->add_option("source", source, "video file or URL")->required();
    analyze->add_option("--language", language, "language hint (BCP-47)");

    std::string dataset;
    bool live = false;
    bool save = false;
    std::string name;
    double max_skipped = 1.0;
    int workers = 0;
    std::string predictions;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a labeled dataset");
    eval_cmd->add_option("dataset", dataset, "dataset file, one JSON record per line")->required();
    eval_cmd->add_flag("--live", live, "run the full pipeline on media paths instead of recorded signals");
    eval_cmd->add_option("--name", name, "report name");
    eval_cmd->add_flag("--save-report", save, "store the report for the HTTP API");
    eval_cmd->add_option("--max-skipped-fraction", max_skipped, "fail when more records are skipped")
        ->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--workers", workers, "concurrent records in live mode");
    eval_cmd->add_option("--predictions", predictions, "write per-record predictions (JSON lines)");

    auto* ablate = app.add_subcommand("ablate", "re-score a dataset with each module removed");
    ablate->add_option("dataset", dataset, "dataset with recorded signals")->required();

    std::vector<std::string> backend_specs;
    std::optional<double> trigger;
    auto* bench = app.add_subcommand("deepfake-bench", "compare deepfake backends on labeled frame sets");
    bench->add_option("dataset", dataset, "dataset file")->required();
    bench->add_option("--backend", backend_specs, "MODEL or MODEL=URL, repeatable")->allow_extra_args(false);
    bench->add_option("--trigger", trigger, "decision cutoff (default: config deepfake_trigger)");

    std::string lexicon_path;
    auto* lexicon = app.add_subcommand("lexicon", "lexicon tools");
    lexicon->require_subcommand(1);
    auto* lexicon_validate = lexicon->add_subcommand("validate", "check a lexicon file");
    lexicon_validate->add_option("file", lexicon_path, "lexicon file")->required();

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
    auto* serve = app.add_subcommand("serve", "run the HTTP API");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port (0 picks a free one)");
    serve->add_option("--static-dir", static_dir, "static files served at /");

    std::vector<std::string> argv_store{"shortcheck"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*analyze) return cmd_analyze(g, source, language, out);
        if (*eval_cmd) return cmd_eval(g, dataset, live, name, save, max_skipped, workers, predictions, out, err);
        if (*ablate) return cmd_ablate(g, dataset, out);
        if (*bench) return cmd_deepfake_bench(g, dataset, backend_specs, trigger, out);
        if (*lexicon_validate) return cmd_lexicon_validate(lexicon_path, out, err);
        if (*serve) return cmd_serve(g, host, port, static_dir, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::UnknownModule || e.code() == ErrorCode::InvalidConfig) return kExitUsage;
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace shortcheck::service
