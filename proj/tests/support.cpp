#include "support.hpp"

#include <atomic>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

#include "shortcheck/core/process.hpp"

namespace testing {

using namespace shortcheck;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("shortcheck-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

PipelineConfig test_config() {
    PipelineConfig config = default_config();
    config.decoder_path = decoder_path().string();
    config.lexicon_paths = {(fixtures_dir() / "lexicons" / "sample.jsonl").string()};
    return config;
}

fs::path synth_clip(const fs::path& out, double duration_s, const std::vector<std::string>& extra) {
    std::vector<std::string> argv{decoder_path().string(), "synth", out.string(), "--duration",
                                  std::to_string(duration_s)};
    argv.insert(argv.end(), extra.begin(), extra.end());
    const auto r = run_process(argv);
    if (r.exit_code != 0) throw std::runtime_error("synth failed: " + r.stderr_text);
    return out;
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    f << bytes;
}

SemanticClass Gen::semantic_class() {
    static const std::vector<SemanticClass> all{SemanticClass::political,   SemanticClass::hostile,
                                                SemanticClass::benign,      SemanticClass::promotional,
                                                SemanticClass::contentious_issue, SemanticClass::unknown};
    return pick(all);
}

Stance Gen::stance() {
    static const std::vector<Stance> all{Stance::supported, Stance::refuted, Stance::disputed, Stance::no_evidence};
    return pick(all);
}

std::string Gen::text(int max_len) {
    static const std::vector<std::string> pieces{"a", "Z", " ", "  ", "é", "ø", "\"", "\\", "\n", "å", "Ş",
                                                 "中", "😀", "x1", "{", "}", ":", ","};
    std::string out;
    const int n = uniform_int(0, max_len);
    for (int i = 0; i < n; ++i) out += pick(pieces);
    return out;
}

BuzzwordHit Gen::buzzword_hit() {
    BuzzwordHit h;
    h.term = "term" + std::to_string(uniform_int(0, 5));
    h.surface = text(8);
    h.source = coin() ? TextSource::transcript : TextSource::overlay;
    h.span.begin = static_cast<std::size_t>(uniform_int(0, 100));
    h.span.end = h.span.begin + static_cast<std::size_t>(uniform_int(1, 12));
    return h;
}

ClaimCheckResult Gen::claim() {
    ClaimCheckResult c;
    c.claim_text = "claim " + text(10);
    c.stance = stance();
    if (c.stance != Stance::no_evidence || coin(0.3)) {
        const int n = uniform_int(1, 3);
        for (int i = 0; i < n; ++i) c.evidence_refs.push_back("https://evidence.example/" + std::to_string(i));
    }
    c.confidence = uniform(0.0, 1.0);
    if (coin(0.2)) c.warning = "degraded";
    return c;
}

ModalitySignals Gen::signals() {
    ModalitySignals s;
    if (coin(0.8)) s.transcript = text();
    if (s.transcript && coin()) s.transcript_lang = coin() ? "no" : "en";
    if (coin(0.8)) s.overlay_text = text();
    if (coin(0.8)) s.video_summary = text();
    s.transcript_verdict = semantic_class();
    s.summary_verdict = semantic_class();
    s.overlay_verdict = semantic_class();
    const int hits = coin(0.6) ? 0 : uniform_int(1, 3);
    for (int i = 0; i < hits; ++i) s.buzzword_hits.push_back(buzzword_hit());
    if (coin(0.5)) s.deepfake_score = uniform(0.0, 1.0);
    const int claims = coin(0.5) ? 0 : uniform_int(1, 4);
    for (int i = 0; i < claims; ++i) s.claim_results.push_back(claim());
    s.is_advertisement = coin(0.2);
    if (coin(0.2)) s.weapon_detected = coin();
    return s;
}

PipelineConfig Gen::config() {
    PipelineConfig c = default_config();
    for (const auto& m : all_modules()) c.module_enabled[m] = coin(0.8);
    for (const auto& s : all_signals()) c.weights[s] = static_cast<double>(uniform_int(0, 8)) / 4.0;
    auto& refuted = c.weights[std::string(signals::kClaimRefuted)];
    auto& present = c.weights[std::string(signals::kClaimPresent)];
    if (refuted < present) std::swap(refuted, present);
    c.threshold = static_cast<double>(uniform_int(1, 16)) / 4.0;
    c.deepfake_trigger = uniform(0.0, 1.0);
    return c;
}

} // namespace testing
