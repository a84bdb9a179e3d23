#include "shortcheck/core/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "shortcheck/core/error.hpp"
#include "shortcheck/core/serialize.hpp"

namespace shortcheck {

const std::vector<std::string>& all_modules() {
    static const std::vector<std::string> kModules{
        std::string(modules::kTranscript), std::string(modules::kOcr),
        std::string(modules::kSummary),    std::string(modules::kBuzzword),
        std::string(modules::kFactCheck),  std::string(modules::kDeepfake),
        std::string(modules::kWeapon),     std::string(modules::kAdFilter),
    };
    return kModules;
}

const std::vector<std::string>& all_signals() {
    static const std::vector<std::string> kSignals{
        std::string(signals::kVerdictTranscript), std::string(signals::kVerdictSummary),
        std::string(signals::kVerdictOverlay),    std::string(signals::kBuzzword),
        std::string(signals::kClaimRefuted),      std::string(signals::kClaimPresent),
        std::string(signals::kDeepfake),          std::string(signals::kWeapon),
    };
    return kSignals;
}

bool is_known_module(std::string_view name) {
    const auto& m = all_modules();
    return std::find(m.begin(), m.end(), name) != m.end();
}

std::vector<std::string> signals_of(std::string_view module) {
    if (module == modules::kTranscript) return {std::string(signals::kVerdictTranscript)};
    if (module == modules::kSummary) return {std::string(signals::kVerdictSummary)};
    if (module == modules::kOcr) return {std::string(signals::kVerdictOverlay)};
    if (module == modules::kBuzzword) return {std::string(signals::kBuzzword)};
    if (module == modules::kFactCheck) {
        return {std::string(signals::kClaimRefuted), std::string(signals::kClaimPresent)};
    }
    if (module == modules::kDeepfake) return {std::string(signals::kDeepfake)};
    if (module == modules::kWeapon) return {std::string(signals::kWeapon)};
    return {};
}

const std::vector<std::string>& all_backends() {
    static const std::vector<std::string> kBackends{
        std::string(backend_names::kTranscription), std::string(backend_names::kOcr),
        std::string(backend_names::kCaptioning),    std::string(backend_names::kLlm),
        std::string(backend_names::kDeepfake),      std::string(backend_names::kClaimDetection),
        std::string(backend_names::kFactcheck),
    };
    return kBackends;
}

bool PipelineConfig::enabled(std::string_view module) const {
    auto it = module_enabled.find(std::string(module));
    return it != module_enabled.end() && it->second;
}

double PipelineConfig::weight(std::string_view signal) const {
    auto it = weights.find(std::string(signal));
    return it == weights.end() ? 0.0 : it->second;
}

PipelineConfig default_config() {
    PipelineConfig config;
    for (const auto& m : all_modules()) config.module_enabled[m] = true;
    config.module_enabled[std::string(modules::kWeapon)] = false;

    config.weights = {
        {std::string(signals::kVerdictTranscript), 1.0},
        {std::string(signals::kVerdictSummary), 1.0},
        {std::string(signals::kVerdictOverlay), 1.0},
        {std::string(signals::kBuzzword), 1.0},
        {std::string(signals::kClaimRefuted), 2.0},
        {std::string(signals::kClaimPresent), 1.0},
        {std::string(signals::kDeepfake), 1.0},
        {std::string(signals::kWeapon), 0.0},
    };
    config.threshold = 2.0;
    config.frame_sample_rate_hz = 0.5;
    config.max_frames = 32;
    config.deepfake_trigger = 0.5;

    const std::pair<std::string_view, std::string_view> models[] = {
        {backend_names::kTranscription, "whisper"},
        {backend_names::kOcr, "easyocr"},
        {backend_names::kCaptioning, "llava"},
        {backend_names::kLlm, "llama3"},
        {backend_names::kDeepfake, "efficientnet"},
        {backend_names::kClaimDetection, "claim-detector"},
        {backend_names::kFactcheck, "factcheck"},
    };
    for (const auto& [name, model] : models) {
        BackendEndpoint ep;
        ep.name = std::string(name);
        ep.base_url = "http://127.0.0.1:8700";
        ep.model = std::string(model);
        config.endpoints.emplace(ep.name, ep);
    }
    config.endpoints[std::string(backend_names::kLlm)].timeout_ms = 120000;
    config.endpoints[std::string(backend_names::kFactcheck)].auth_token_env = "SHORTCHECK_FACTCHECK_TOKEN";
    return config;
}

std::vector<std::string> validate(const PipelineConfig& config) {
    std::vector<std::string> out;
    if (!(config.threshold > 0.0)) out.emplace_back("threshold must be > 0");
    if (!(config.frame_sample_rate_hz > 0.0)) out.emplace_back("frame_sample_rate_hz must be > 0");
    if (config.max_frames < 1) out.emplace_back("max_frames must be >= 1");
    if (!(config.deepfake_trigger >= 0.0 && config.deepfake_trigger <= 1.0)) {
        out.emplace_back("deepfake_trigger must be in [0,1]");
    }
    for (const auto& [name, on] : config.module_enabled) {
        if (!is_known_module(name)) out.push_back("module_enabled." + name + ": unknown module");
    }
    const auto& known_signals = all_signals();
    for (const auto& [name, w] : config.weights) {
        if (std::find(known_signals.begin(), known_signals.end(), name) == known_signals.end()) {
            out.push_back("weights." + name + ": unknown signal");
        } else if (!(w >= 0.0)) {
            out.push_back("weights." + name + " must be >= 0");
        }
    }
    // A refuted claim replaces claim.present; keeping it at least as heavy
    // keeps the score monotone when a claim turns out refuted.
    if (config.weight(signals::kClaimRefuted) < config.weight(signals::kClaimPresent)) {
        out.emplace_back("weights.claim.refuted must be >= weights.claim.present");
    }
    for (const auto& [name, ep] : config.endpoints) {
        if (ep.timeout_ms <= 0) out.push_back("endpoints." + name + ".timeout_ms must be > 0");
        if (ep.max_retries < 0) out.push_back("endpoints." + name + ".max_retries must be >= 0");
        if (ep.base_url.empty()) out.push_back("endpoints." + name + ".base_url must be non-empty");
    }
    if (config.workers < 1) out.emplace_back("workers must be >= 1");
    return out;
}

PipelineConfig config_from_text(std::string_view text) {
    try {
        return Json::parse(text).get<PipelineConfig>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_text(buf.str());
}

namespace {

std::string env_key(std::string_view backend, std::string_view suffix) {
    std::string key = "SHORTCHECK_";
    for (char c : backend) key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    key.push_back('_');
    key.append(suffix);
    return key;
}

} // namespace

void apply_environment(PipelineConfig& config) {
    for (auto& [name, ep] : config.endpoints) {
        if (const char* url = std::getenv(env_key(name, "URL").c_str()); url && *url) ep.base_url = url;
        if (ep.auth_token_env) {
            if (const char* tok = std::getenv(ep.auth_token_env->c_str()); tok && *tok) ep.auth_token = tok;
        }
        if (const char* tok = std::getenv(env_key(name, "TOKEN").c_str()); tok && *tok) ep.auth_token = tok;
    }
}

std::string redacted_text(const PipelineConfig& config) {
    Json j = config;
    for (const auto& [name, ep] : config.endpoints) {
        if (ep.auth_token) j["endpoints"][name]["auth_token"] = "***";
    }
    return j.dump();
}

} // namespace shortcheck
