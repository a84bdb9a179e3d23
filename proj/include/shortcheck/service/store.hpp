#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shortcheck/eval/metrics.hpp"
#include "shortcheck/service/record.hpp"

namespace shortcheck::service {

/// Content-addressed file store:
///
///   <root>/records/<video_id>/<config_digest>.json   canonical AnalysisRecord
///   <root>/media/<sha256><ext>                        uploaded media
///   <root>/reports/<id>.json                          EvalReport
///
/// Every file is written to a temporary name and then hard-linked into place,
/// so readers never observe a partial file and an existing entry is never
/// replaced. Safe for concurrent use from several threads and processes.
class Store {
public:
    explicit Store(std::filesystem::path root);

    [[nodiscard]] const std::filesystem::path& root() const { return root_; }

    [[nodiscard]] std::optional<std::string> record_bytes(const std::string& video_id,
                                                          const std::string& config_digest) const;
    [[nodiscard]] std::optional<AnalysisRecord> record(const std::string& video_id,
                                                       const std::string& config_digest) const;
    // Config digests with a stored record for `video_id`, sorted.
    [[nodiscard]] std::vector<std::string> digests_for(const std::string& video_id) const;

    /// Stores the canonical encoding unless a record for the key already
    /// exists. Returns the bytes now on disk for the key.
    std::string put_record(const AnalysisRecord& record);

    // Returns the stored path; identical bytes land on the same path.
    std::filesystem::path put_media(std::string_view bytes, const std::string& extension);

    void put_report(const std::string& id, const eval::EvalReport& report);
    [[nodiscard]] std::optional<eval::EvalReport> report(const std::string& id) const;
    [[nodiscard]] std::vector<std::string> report_ids() const;

private:
    std::filesystem::path root_;
};

// True for ids made of [A-Za-z0-9._-] that are not "." or "..".
bool is_safe_id(std::string_view id);

} // namespace shortcheck::service
