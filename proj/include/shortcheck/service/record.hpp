#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "shortcheck/core/config.hpp"
#include "shortcheck/core/serialize.hpp"
#include "shortcheck/core/types.hpp"

namespace shortcheck::service {

enum class ModuleState { ok, failed, disabled };

std::string_view to_string(ModuleState state);

struct ModuleStatus {
    ModuleState status = ModuleState::ok;
    std::int64_t elapsed_ms = 0;
    std::optional<std::string> error; // failed modules only
    std::optional<std::string> note;  // e.g. "no audio stream"

    bool operator==(const ModuleStatus&) const = default;
};

// Pipeline stage that runs the combined summarize-and-classify prompt. It is
// reported next to the modules because it serves several of them at once.
inline constexpr std::string_view kClassifyStage = "classify";

struct AnalysisRecord {
    std::string video_id;
    std::string config_digest;
    std::string created_at; // UTC, ISO 8601
    ModalitySignals signals;
    CheckworthinessResult result;
    std::map<std::string, ModuleStatus> modules;

    bool operator==(const AnalysisRecord&) const = default;
};

void to_json(Json& j, const ModuleStatus& value);
void from_json(const Json& j, ModuleStatus& value);
void to_json(Json& j, const AnalysisRecord& value);
void from_json(const Json& j, AnalysisRecord& value);

/// Digest of everything that can change an analysis: module toggles, weights,
/// threshold, sampling, deepfake trigger, backend model names, the content of
/// each lexicon file and the classification prompt text. Endpoint URLs,
/// timeouts, retries, tokens and operational settings are left out.
std::string config_digest(const PipelineConfig& config);

} // namespace shortcheck::service
