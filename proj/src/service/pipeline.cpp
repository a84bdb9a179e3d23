#include "shortcheck/service/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <future>

#include "shortcheck/backends/clients.hpp"
#include "shortcheck/claims/verifier.hpp"
#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"
#include "shortcheck/decision/engine.hpp"

namespace shortcheck::service {

namespace fs = std::filesystem;

std::string SystemClock::now_utc() const {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::int64_t SystemClock::monotonic_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

namespace {

ModuleStatus disabled_status() {
    return ModuleStatus{ModuleState::disabled, 0, std::nullopt, std::nullopt};
}

// Runs one stage, timing it and turning any exception into a failed status.
template <typename F>
auto timed(const Clock& clock, ModuleStatus& status, F&& f) -> std::optional<decltype(f())> {
    const auto t0 = clock.monotonic_ms();
    try {
        auto value = f();
        status.status = ModuleState::ok;
        status.elapsed_ms = clock.monotonic_ms() - t0;
        return value;
    } catch (const std::exception& e) {
        status.status = ModuleState::failed;
        status.error = e.what();
        status.elapsed_ms = clock.monotonic_ms() - t0;
        return std::nullopt;
    }
}

bool blank(const std::optional<std::string>& s) {
    return !s || s->find_first_not_of(" \t\r\n") == std::string::npos;
}

} // namespace

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<Store> store, std::shared_ptr<const Clock> clock,
                   std::shared_ptr<ingest::SourceResolver> resolver)
    : config_(std::move(config)),
      digest_(config_digest(config_)),
      store_(std::move(store)),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()),
      resolver_(resolver ? std::move(resolver) : std::make_shared<ingest::LocalFileResolver>()),
      decoder_(ingest::find_decoder(config_.decoder_path)),
      work_root_(store_->root() / "work") {
    if (const auto problems = validate(config_); !problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += " " + p + ";";
        throw Error(ErrorCode::InvalidConfig, msg);
    }
    try {
        std::vector<buzzword::Lexicon> lexicons;
        for (const auto& path : config_.lexicon_paths) {
            auto loaded = buzzword::load_lexicons(path);
            lexicons.insert(lexicons.end(), loaded.begin(), loaded.end());
        }
        if (const auto problems = buzzword::validate(lexicons); !problems.empty()) {
            throw Error(ErrorCode::BadLexicon, problems.front());
        }
        detector_.emplace(std::move(lexicons));
    } catch (const Error& e) {
        lexicon_error_ = e.what();
    }
}

std::string Pipeline::admit(const std::string& source) {
    auto workspace = std::make_shared<ingest::Workspace>(work_root_);
    const fs::path media = resolver_->resolve(source, workspace->path());
    ingest::check_admissible(decoder_.probe(media), source);
    return sha256_file(media);
}

AnalyzeOutcome Pipeline::analyze(const std::string& source, const std::optional<std::string>& language_hint) {
    auto workspace = std::make_shared<ingest::Workspace>(work_root_);
    const fs::path media = resolver_->resolve(source, workspace->path());
    std::string video_id = sha256_file(media);

    if (auto bytes = store_->record_bytes(video_id, digest_)) {
        return AnalyzeOutcome{parse<AnalysisRecord>(*bytes), std::move(*bytes), true};
    }

    ingest::IngestOptions options;
    options.language_hint = language_hint;
    const auto bundle =
        ingest::ingest_resolved(media, source, std::move(video_id), config_, decoder_, workspace, options);
    AnalysisRecord record = run(bundle);
    std::string bytes = store_->put_record(record);
    return AnalyzeOutcome{parse<AnalysisRecord>(bytes), std::move(bytes), false};
}

AnalysisRecord Pipeline::run(const ingest::MediaBundle& bundle) {
    const Clock& clock = *clock_;
    auto client = [this](std::string_view backend) {
        auto it = config_.endpoints.find(std::string(backend));
        if (it == config_.endpoints.end()) {
            throw Error(ErrorCode::InvalidConfig, "no endpoint configured for backend '" + std::string(backend) + "'");
        }
        return backends::BackendClient(it->second);
    };
    auto on = [this](std::string_view module) { return config_.enabled(module); };

    AnalysisRecord rec;
    rec.video_id = bundle.video.id;
    rec.config_digest = digest_;
    rec.created_at = clock.now_utc();
    ModalitySignals& s = rec.signals;

    ModuleStatus transcript_st = disabled_status();
    ModuleStatus ocr_st = disabled_status();
    ModuleStatus summary_st = disabled_status();
    ModuleStatus deepfake_st = disabled_status();

    // Independent modality calls fan out; classification waits for all of them.
    std::future<std::optional<backends::Transcript>> transcript_f;
    if (on(modules::kTranscript)) {
        if (bundle.audio_path) {
            transcript_f = std::async(std::launch::async, [&] {
                return timed(clock, transcript_st, [&] {
                    return backends::transcribe(client(backend_names::kTranscription), *bundle.audio_path,
                                                bundle.video.language_hint);
                });
            });
        } else {
            transcript_st = ModuleStatus{ModuleState::ok, 0, std::nullopt, "no audio stream"};
        }
    }
    std::future<std::optional<backends::OcrResult>> ocr_f;
    if (on(modules::kOcr)) {
        ocr_f = std::async(std::launch::async, [&] {
            return timed(clock, ocr_st,
                         [&] { return backends::ocr_frames(client(backend_names::kOcr), bundle.frames); });
        });
    }
    std::future<std::optional<std::vector<std::string>>> caption_f;
    if (on(modules::kSummary)) {
        caption_f = std::async(std::launch::async, [&] {
            return timed(clock, summary_st, [&] {
                return backends::caption_frames(client(backend_names::kCaptioning), bundle.frames);
            });
        });
    }
    std::future<std::optional<backends::DeepfakeResult>> deepfake_f;
    if (on(modules::kDeepfake)) {
        deepfake_f = std::async(std::launch::async, [&] {
            return timed(clock, deepfake_st, [&] {
                return backends::deepfake_score(client(backend_names::kDeepfake), bundle.frames);
            });
        });
    }

    std::vector<std::string> captions;
    if (transcript_f.valid()) {
        if (auto t = transcript_f.get()) {
            s.transcript = t->text;
            s.transcript_lang = t->detected_lang;
        }
    }
    if (ocr_f.valid()) {
        if (auto o = ocr_f.get()) s.overlay_text = o->overlay_text;
    }
    if (caption_f.valid()) {
        if (auto c = caption_f.get()) captions = std::move(*c);
    }
    if (deepfake_f.valid()) {
        if (auto d = deepfake_f.get()) s.deepfake_score = d->score;
    }

    ModuleStatus classify_st = disabled_status();
    const bool want_classify =
        on(modules::kTranscript) || on(modules::kOcr) || on(modules::kSummary) || on(modules::kAdFilter);
    if (want_classify) {
        auto classification = timed(clock, classify_st, [&]() -> std::optional<backends::Classification> {
            try {
                return backends::summarize_and_classify(client(backend_names::kLlm), captions,
                                                        s.transcript.value_or(""), s.overlay_text.value_or(""));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::EmptyInput) throw;
                return std::nullopt;
            }
        });
        if (classify_st.status == ModuleState::ok && !(classification && *classification)) {
            classify_st.note = "no text or captions to classify";
        }
        if (classification && *classification) {
            const auto& c = **classification;
            if (!blank(s.transcript)) s.transcript_verdict = c.transcript_verdict;
            if (!blank(s.overlay_text)) s.overlay_verdict = c.overlay_verdict;
            if (summary_st.status == ModuleState::ok && !c.video_summary.empty()) {
                s.video_summary = c.video_summary;
                s.summary_verdict = c.summary_verdict;
            }
            if (on(modules::kAdFilter)) s.is_advertisement = c.is_advertisement;
        }
        if (classify_st.status == ModuleState::failed && summary_st.status == ModuleState::ok) {
            summary_st.status = ModuleState::failed;
            summary_st.error = "classification failed: " + classify_st.error.value_or("");
        }
    }

    ModuleStatus buzzword_st = disabled_status();
    if (on(modules::kBuzzword)) {
        auto hits = timed(clock, buzzword_st, [&] {
            if (lexicon_error_) throw Error(ErrorCode::BadLexicon, *lexicon_error_);
            std::vector<BuzzwordHit> out;
            if (s.transcript) {
                auto h = detector_->detect(*s.transcript, TextSource::transcript);
                out.insert(out.end(), h.begin(), h.end());
            }
            if (s.overlay_text) {
                auto h = detector_->detect(*s.overlay_text, TextSource::overlay);
                out.insert(out.end(), h.begin(), h.end());
            }
            return out;
        });
        if (hits) s.buzzword_hits = std::move(*hits);
    }

    ModuleStatus factcheck_st = disabled_status();
    if (on(modules::kFactCheck)) {
        std::vector<std::string> texts;
        if (!blank(s.transcript)) texts.push_back(*s.transcript);
        if (!blank(s.video_summary)) texts.push_back(*s.video_summary);
        if (texts.empty()) {
            factcheck_st = ModuleStatus{ModuleState::ok, 0, std::nullopt, "no transcript or summary to check"};
        } else {
            auto results = timed(clock, factcheck_st, [&] {
                const auto detector = client(backend_names::kClaimDetection);
                std::vector<std::string> claims;
                for (const auto& text : texts) {
                    for (auto& claim : claims::detect_claims(detector, text)) {
                        if (std::find(claims.begin(), claims.end(), claim) == claims.end()) {
                            claims.push_back(std::move(claim));
                        }
                    }
                }
                return claims::verify_claims(client(backend_names::kFactcheck), claims);
            });
            if (results) s.claim_results = std::move(*results);
        }
    }

    ModuleStatus weapon_st = disabled_status();
    if (on(modules::kWeapon)) {
        weapon_st = ModuleStatus{ModuleState::failed, 0, "no weapon detection backend is available", std::nullopt};
    }

    ModuleStatus ad_st = disabled_status();
    if (on(modules::kAdFilter)) {
        ad_st.status = classify_st.status == ModuleState::failed ? ModuleState::failed : ModuleState::ok;
        if (ad_st.status == ModuleState::failed) ad_st.error = "classification failed";
    }

    rec.modules[std::string(modules::kTranscript)] = transcript_st;
    rec.modules[std::string(modules::kOcr)] = ocr_st;
    rec.modules[std::string(modules::kSummary)] = summary_st;
    rec.modules[std::string(modules::kDeepfake)] = deepfake_st;
    rec.modules[std::string(kClassifyStage)] = classify_st;
    rec.modules[std::string(modules::kBuzzword)] = buzzword_st;
    rec.modules[std::string(modules::kFactCheck)] = factcheck_st;
    rec.modules[std::string(modules::kWeapon)] = weapon_st;
    rec.modules[std::string(modules::kAdFilter)] = ad_st;

    rec.result = decision::score(s, config_);
    return rec;
}

} // namespace shortcheck::service
