#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shortcheck/buzzword/detector.hpp"
#include "shortcheck/core/config.hpp"
#include "shortcheck/ingest/media.hpp"
#include "shortcheck/service/record.hpp"
#include "shortcheck/service/store.hpp"

namespace shortcheck::service {

class Clock {
public:
    virtual ~Clock() = default;
    virtual std::string now_utc() const = 0;         // ISO 8601, second precision
    virtual std::int64_t monotonic_ms() const = 0;
};

class SystemClock : public Clock {
public:
    std::string now_utc() const override;
    std::int64_t monotonic_ms() const override;
};

// Fixed timestamp and zero elapsed time; makes records byte-reproducible.
class FrozenClock : public Clock {
public:
    explicit FrozenClock(std::string timestamp = "1970-01-01T00:00:00Z") : timestamp_(std::move(timestamp)) {}
    std::string now_utc() const override { return timestamp_; }
    std::int64_t monotonic_ms() const override { return 0; }

private:
    std::string timestamp_;
};

struct AnalyzeOutcome {
    AnalysisRecord record;
    std::string bytes; // canonical encoding as stored
    bool cached = false;
};

/// End-to-end analysis: ingest, concurrent modality extraction, combined
/// classification, buzzwords, claim verification, scoring, persistence.
///
/// Only ingest errors (TooLong, Unreadable, Unsupported) escape analyze().
/// Any other module failure is recorded as status "failed" and the module's
/// signals stay absent. Results are cached in the store under
/// (video_id, config_digest); a cache hit makes no backend request.
class Pipeline {
public:
    Pipeline(PipelineConfig config, std::shared_ptr<Store> store, std::shared_ptr<const Clock> clock = nullptr,
             std::shared_ptr<ingest::SourceResolver> resolver = nullptr);

    AnalyzeOutcome analyze(const std::string& source, const std::optional<std::string>& language_hint = {});

    /// Resolves and probes `source` without running any backend; applies the
    /// admission rules (TooLong, Unsupported). Returns the video id.
    std::string admit(const std::string& source);

    [[nodiscard]] const PipelineConfig& config() const { return config_; }
    [[nodiscard]] const std::string& digest() const { return digest_; }
    [[nodiscard]] Store& store() const { return *store_; }

    // Where ingest workspaces are created; defaults to <store>/work.
    void set_work_root(std::filesystem::path root) { work_root_ = std::move(root); }

private:
    AnalysisRecord run(const ingest::MediaBundle& bundle);

    PipelineConfig config_;
    std::string digest_;
    std::shared_ptr<Store> store_;
    std::shared_ptr<const Clock> clock_;
    std::shared_ptr<ingest::SourceResolver> resolver_;
    ingest::Decoder decoder_;
    std::filesystem::path work_root_;
    std::optional<buzzword::Detector> detector_;
    std::optional<std::string> lexicon_error_;
};

} // namespace shortcheck::service
