#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shortcheck {

// Toggleable pipeline modules. Each scoring signal derives from exactly one.
namespace modules {
inline constexpr std::string_view kTranscript = "transcript";
inline constexpr std::string_view kOcr = "ocr";
inline constexpr std::string_view kSummary = "summary";
inline constexpr std::string_view kBuzzword = "buzzword";
inline constexpr std::string_view kFactCheck = "fact_check";
inline constexpr std::string_view kDeepfake = "deepfake";
inline constexpr std::string_view kWeapon = "weapon";
inline constexpr std::string_view kAdFilter = "ad_filter";
} // namespace modules

namespace signals {
inline constexpr std::string_view kVerdictTranscript = "verdict.transcript";
inline constexpr std::string_view kVerdictSummary = "verdict.summary";
inline constexpr std::string_view kVerdictOverlay = "verdict.overlay";
inline constexpr std::string_view kBuzzword = "buzzword";
inline constexpr std::string_view kClaimRefuted = "claim.refuted";
inline constexpr std::string_view kClaimPresent = "claim.present";
inline constexpr std::string_view kDeepfake = "deepfake";
inline constexpr std::string_view kWeapon = "weapon";
} // namespace signals

const std::vector<std::string>& all_modules();
const std::vector<std::string>& all_signals();
bool is_known_module(std::string_view name);
// Signals scored on behalf of `module`; empty for ad_filter.
std::vector<std::string> signals_of(std::string_view module);

namespace backend_names {
inline constexpr std::string_view kTranscription = "transcription";
inline constexpr std::string_view kOcr = "ocr";
inline constexpr std::string_view kCaptioning = "captioning";
inline constexpr std::string_view kLlm = "llm";
inline constexpr std::string_view kDeepfake = "deepfake";
inline constexpr std::string_view kClaimDetection = "claim_detection";
inline constexpr std::string_view kFactcheck = "factcheck";
} // namespace backend_names

const std::vector<std::string>& all_backends();

struct BackendEndpoint {
    std::string name;
    std::string base_url;
    int timeout_ms = 60000;
    int max_retries = 2;
    std::string model;
    // Never serialized; filled from `auth_token_env` at load time.
    std::optional<std::string> auth_token;
    std::optional<std::string> auth_token_env;

    bool operator==(const BackendEndpoint&) const = default;
};

struct PipelineConfig {
    std::map<std::string, bool> module_enabled;
    std::map<std::string, double> weights;
    double threshold = 2.0;
    double frame_sample_rate_hz = 0.5;
    int max_frames = 32;
    std::map<std::string, BackendEndpoint> endpoints;
    std::vector<std::string> lexicon_paths;
    double deepfake_trigger = 0.5;

    // Operational settings; they do not influence analysis output and are
    // excluded from the config digest.
    std::string decoder_path;
    std::string store_dir = "shortcheck-store";
    int workers = 2;
    std::size_t max_upload_bytes = std::size_t{256} << 20;

    [[nodiscard]] bool enabled(std::string_view module) const;
    [[nodiscard]] double weight(std::string_view signal) const;

    bool operator==(const PipelineConfig&) const = default;
};

PipelineConfig default_config();

/// Returns one message per violated field invariant, each naming the field.
std::vector<std::string> validate(const PipelineConfig& config);

// Reads a JSON config file. Keys that are absent keep their default values.
PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_text(std::string_view text);

/// Applies SHORTCHECK_<BACKEND>_URL and SHORTCHECK_<BACKEND>_TOKEN overrides
/// and resolves `auth_token_env` references.
void apply_environment(PipelineConfig& config);

// Canonical text with auth tokens replaced by "***".
std::string redacted_text(const PipelineConfig& config);

} // namespace shortcheck
