// shortcheck-fixtures: regenerates the offline test fixtures.
//
//   beirut    <fixtures-dir>   synthesize beirut.mp4 and record backend replies
//   synthetic <fixtures-dir>   write the synthetic evaluation datasets
//   deepfake  <fixtures-dir>   write the deepfake benchmark set and its replies
//
// Backend replies are produced by scripted handlers and captured through a
// recording mock server, so the stored request digests are exactly the ones
// the pipeline computes at replay time.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shortcheck/backends/clients.hpp"
#include "shortcheck/backends/mock_server.hpp"
#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"
#include "shortcheck/core/process.hpp"
#include "shortcheck/core/serialize.hpp"
#include "shortcheck/eval/harness.hpp"
#include "shortcheck/ingest/media.hpp"
#include "shortcheck/service/pipeline.hpp"

namespace fs = std::filesystem;
using namespace shortcheck;
using backends::MockReply;

namespace {

void run_decoder(const std::vector<std::string>& args) {
    std::vector<std::string> argv{ingest::find_decoder("").string()};
    argv.insert(argv.end(), args.begin(), args.end());
    const auto r = run_process(argv);
    if (r.exit_code != 0) throw Error(ErrorCode::Io, "decoder failed: " + r.stderr_text);
}

// The worked example: overlay caption over two frames, a short Arabic
// remark, explosion footage. Replies are keyed on the op and request content.
MockReply beirut_reply(const std::string& op, const Json& request) {
    const Json& in = request.at("input");
    if (op == backends::ops::kTranscribe) {
        return {200, Json{{"language", "ar"},
                          {"segments", Json::array({Json{{"t0", 0.4}, {"t1", 2.1}, {"text", " إنه لأمر مخجل"}}})}}};
    }
    if (op == backends::ops::kOcr) {
        Json frames = Json::array();
        for (const auto& f : in.at("frames")) {
            const int index = f.at("index").get<int>();
            const std::string text = index == 0 ? "Someone captured the" : "missile in the Beirut blast";
            frames.push_back(Json{{"index", index}, {"text", text}, {"boxes", Json::array({{24, 180, 296, 204}})}});
        }
        return {200, Json{{"frames", frames}}};
    }
    if (op == backends::ops::kCaption) {
        static const char* kCaptions[] = {
            "a city street with smoke rising behind buildings",
            "a large explosion over a harbor with a mushroom-shaped cloud",
            "damaged buildings and debris scattered across an urban area",
        };
        Json captions = Json::array();
        for (const auto& f : in.at("frames")) captions.push_back(kCaptions[f.at("index").get<int>() % 3]);
        return {200, Json{{"captions", captions}}};
    }
    if (op == backends::ops::kGenerate) {
        const std::string prompt = in.at("prompt").get<std::string>();
        const bool has_transcript = prompt.find("Speech transcript:\n(none)") == std::string::npos;
        std::string reply =
            "summary: The video captures footage of the 2020 Beirut blast, showing destruction and chaos in an "
            "urban area, with explosions visible throughout.\n";
        reply += has_transcript ? "transcript_verdict: hostile\n" : "transcript_verdict: n/a\n";
        reply += "summary_verdict: contentious-issue\noverlay_verdict: hostile\nadvertisement: no";
        return {200, Json{{"text", reply}}};
    }
    if (op == backends::ops::kDeepfake) {
        Json frames = Json::array();
        for (const auto& f : in.at("frames")) {
            frames.push_back(Json{{"index", f.at("index")}, {"face", false}, {"score", 0.0}});
        }
        return {200, Json{{"frames", frames}}};
    }
    if (op == backends::ops::kDetectClaims) {
        const auto n = in.at("sentences").size();
        return {200, Json{{"labels", std::vector<bool>(n, false)}}};
    }
    return {404, Json{{"error", "unscripted op " + op}}};
}

int cmd_beirut(const fs::path& dir) {
    const fs::path video = dir / "beirut.mp4";
    run_decoder({"synth", video.string(), "--duration", "6", "--fps", "4", "--width", "320", "--height", "240",
                 "--audio", "tone", "--tone-hz", "220", "--seed", "2020"});

    auto store = std::make_shared<backends::FixtureStore>(dir / "recorded");
    backends::MockServer server(beirut_reply);
    server.record_into(store);

    const fs::path scratch = fs::temp_directory_path() / "shortcheck-fixtures";
    fs::remove_all(scratch);
    PipelineConfig config = default_config();
    config.lexicon_paths = {(dir / "lexicons" / "sample.jsonl").string()};
    backends::point_endpoints_at(config, server.base_url());

    auto print = [](const char* scenario, const service::AnalyzeOutcome& o) {
        std::cout << scenario << ": label " << to_string(o.record.result.label) << ", score " << o.record.result.score
                  << "\n";
        for (const auto& [name, st] : o.record.modules) {
            if (st.status == service::ModuleState::failed) std::cout << "  " << name << " failed: " << *st.error << "\n";
        }
    };
    {
        service::Pipeline pipeline(config, std::make_shared<service::Store>(scratch / "normal"),
                                   std::make_shared<service::FrozenClock>());
        print("normal", pipeline.analyze(video.string()));
    }
    {
        server.set_down(std::string(backend_names::kTranscription));
        service::Pipeline pipeline(config, std::make_shared<service::Store>(scratch / "down"),
                                   std::make_shared<service::FrozenClock>());
        print("transcription down", pipeline.analyze(video.string()));
    }
    fs::remove_all(scratch);
    return 0;
}

ModalitySignals synthetic_signals(bool checkworthy, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto verdict = [&](double p_flag) {
        const double r = u(rng);
        if (r < p_flag) {
            static const SemanticClass kFlag[] = {SemanticClass::political, SemanticClass::hostile,
                                                  SemanticClass::contentious_issue};
            return kFlag[static_cast<int>(u(rng) * 3) % 3];
        }
        return u(rng) < 0.8 ? SemanticClass::benign : SemanticClass::promotional;
    };
    ModalitySignals s;
    const double p = checkworthy ? 0.7 : 0.15;
    s.transcript = checkworthy ? "synthetic transcript, check-worthy topic" : "synthetic transcript, everyday topic";
    s.transcript_lang = "und";
    s.overlay_text = "synthetic overlay";
    s.video_summary = "synthetic summary";
    s.transcript_verdict = verdict(p);
    s.summary_verdict = verdict(p * 0.8);
    s.overlay_verdict = verdict(p * 0.9);
    if (u(rng) < (checkworthy ? 0.35 : 0.04)) {
        s.buzzword_hits.push_back(BuzzwordHit{"stem frp", "Stem FRP", TextSource::overlay, Span{0, 8}});
    }
    if (u(rng) < (checkworthy ? 0.2 : 0.05)) {
        ClaimCheckResult c;
        c.claim_text = "synthetic claim";
        c.stance = u(rng) < 0.5 ? Stance::refuted : Stance::no_evidence;
        if (c.stance == Stance::refuted) c.evidence_refs = {"https://factcheck.example/synthetic"};
        c.confidence = 0.8;
        s.claim_results.push_back(c);
    }
    if (u(rng) < 0.3) s.deepfake_score = checkworthy ? 0.2 + 0.7 * u(rng) : 0.4 * u(rng);
    s.is_advertisement = !checkworthy && u(rng) < 0.12;
    return s;
}

void write_synthetic(const fs::path& file, const std::string& prefix, const std::string& language, int cw,
                     int ncw, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<bool> golds(static_cast<std::size_t>(cw), true);
    golds.insert(golds.end(), static_cast<std::size_t>(ncw), false);
    std::shuffle(golds.begin(), golds.end(), rng);
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << "# Synthetic " << language << " dataset: " << cw << " Checkworthy, " << ncw
        << " Not_Checkworthy records. Generated by shortcheck-fixtures.\n";
    for (std::size_t i = 0; i < golds.size(); ++i) {
        eval::DatasetRecord rec;
        char id[32];
        std::snprintf(id, sizeof(id), "%s-%03zu", prefix.c_str(), i);
        rec.video_id = id;
        rec.gold_label = golds[i] ? Label::Checkworthy : Label::Not_Checkworthy;
        rec.language = language;
        rec.signals = synthetic_signals(golds[i], rng);
        out << Json(rec).dump() << "\n";
    }
    if (!out) throw Error(ErrorCode::Io, "cannot write " + file.string());
}

int cmd_synthetic(const fs::path& dir) {
    fs::create_directories(dir / "synthetic");
    write_synthetic(dir / "synthetic" / "norwegian.recs", "no", "no", 33, 204, 237);
    write_synthetic(dir / "synthetic" / "english.recs", "en", "en", 114, 140, 254);
    return 0;
}

int cmd_deepfake(const fs::path& dir) {
    const fs::path bench = dir / "deepfake";
    fs::create_directories(bench / "frames");
    const fs::path scratch = fs::temp_directory_path() / "shortcheck-fixtures-deepfake";
    fs::create_directories(scratch);

    // Five fake and five real samples of two frames each. Each image gets a
    // distinct synthetic pattern so its digest identifies the sample.
    std::map<std::string, std::pair<int, bool>> by_digest; // image sha -> (sample, fake)
    std::ofstream listing(bench / "bench.jsonl", std::ios::binary | std::ios::trunc);
    listing << "# Deepfake benchmark fixture: frame sets labeled fake or real.\n";
    for (int sample = 0; sample < 10; ++sample) {
        const bool fake = sample < 5;
        Json frames = Json::array();
        for (int k = 0; k < 2; ++k) {
            const int seed = 100 + sample * 2 + k;
            const fs::path clip = scratch / ("clip" + std::to_string(seed) + ".mp4");
            run_decoder({"synth", clip.string(), "--duration", "1", "--fps", "1", "--width", "48", "--height", "48",
                         "--audio", "none", "--seed", std::to_string(seed)});
            const fs::path out_dir = scratch / ("frames" + std::to_string(seed));
            run_decoder({"frames", clip.string(), out_dir.string(), "0"});
            const std::string name = (fake ? "fake" : "real") + std::to_string(sample) + "_" + std::to_string(k) + ".png";
            fs::copy_file(out_dir / "frame_00000.png", bench / "frames" / name, fs::copy_options::overwrite_existing);
            const auto digest = sha256_file(bench / "frames" / name);
            if (!by_digest.emplace(digest, std::make_pair(sample, fake)).second) {
                throw Error(ErrorCode::Io, "synthetic frames collide; change the seeds");
            }
            frames.push_back("frames/" + name);
        }
        char id[16];
        std::snprintf(id, sizeof(id), "df-%02d", sample);
        listing << Json{{"id", id}, {"label", fake ? "fake" : "real"}, {"frames", frames}}.dump() << "\n";
    }
    listing.close();
    fs::remove_all(scratch);

    // efficientnet: confident on fakes except sample 4; clean on reals.
    // wvolf: never finds a manipulated face.
    auto handler = [by_digest](const std::string& op, const Json& request) -> MockReply {
        if (op != backends::ops::kDeepfake) return {404, Json{{"error", "unscripted op " + op}}};
        const std::string model = request.at("model").get<std::string>();
        Json frames = Json::array();
        for (const auto& f : request.at("input").at("frames")) {
            const auto digest = sha256_hex(base64_decode(f.at("png_b64").get<std::string>()));
            const auto [sample, fake] = by_digest.at(digest);
            double score = 0.0;
            if (model == "efficientnet") score = fake && sample != 4 ? 0.93 : 0.08;
            frames.push_back(Json{{"index", f.at("index")}, {"face", true}, {"score", score}});
        }
        return {200, Json{{"frames", frames}}};
    };
    auto store = std::make_shared<backends::FixtureStore>(dir / "recorded");
    backends::MockServer server(handler);
    server.record_into(store);
    PipelineConfig config = default_config();
    backends::point_endpoints_at(config, server.base_url());
    const auto dataset = eval::load_deepfake_dataset(bench / "bench.jsonl");
    std::vector<eval::DeepfakeBackend> models;
    for (const std::string name : {"efficientnet", "wvolf"}) {
        BackendEndpoint ep = config.endpoints.at(std::string(backend_names::kDeepfake));
        ep.model = name;
        models.push_back({name, [client = backends::BackendClient(ep)](const eval::DeepfakeSample& s) {
                              return backends::deepfake_score_images(client, s.frames).score;
                          }});
    }
    std::cout << eval::render_text(eval::compare_deepfake_backends(dataset, models, config.deepfake_trigger));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"regenerate shortcheck test fixtures"};
    app.require_subcommand(1);
    std::string dir;
    auto* beirut = app.add_subcommand("beirut", "worked-example clip and its recorded replies");
    beirut->add_option("dir", dir)->required();
    auto* synthetic = app.add_subcommand("synthetic", "synthetic evaluation datasets");
    synthetic->add_option("dir", dir)->required();
    auto* deepfake = app.add_subcommand("deepfake", "deepfake benchmark set and recorded replies");
    deepfake->add_option("dir", dir)->required();
    CLI11_PARSE(app, argc, argv);
    try {
        if (*beirut) return cmd_beirut(dir);
        if (*synthetic) return cmd_synthetic(dir);
        if (*deepfake) return cmd_deepfake(dir);
    } catch (const std::exception& e) {
        std::cerr << "shortcheck-fixtures: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
