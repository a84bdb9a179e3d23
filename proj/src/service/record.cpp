#include "shortcheck/service/record.hpp"

#include "shortcheck/backends/clients.hpp"
#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"

namespace shortcheck::service {

std::string_view to_string(ModuleState state) {
    switch (state) {
    case ModuleState::ok: return "ok";
    case ModuleState::failed: return "failed";
    case ModuleState::disabled: return "disabled";
    }
    return "failed";
}

void to_json(Json& j, const ModuleStatus& value) {
    j = Json{{"status", std::string(to_string(value.status))}, {"elapsed_ms", value.elapsed_ms}};
    if (value.error) j["error"] = *value.error;
    if (value.note) j["note"] = *value.note;
}

void from_json(const Json& j, ModuleStatus& value) {
    const auto s = j.at("status").get<std::string>();
    if (s == "ok") {
        value.status = ModuleState::ok;
    } else if (s == "failed") {
        value.status = ModuleState::failed;
    } else if (s == "disabled") {
        value.status = ModuleState::disabled;
    } else {
        throw Json::other_error::create(501, "unknown module status '" + s + "'", &j);
    }
    value.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
    value.error = j.contains("error") ? std::optional(j.at("error").get<std::string>()) : std::nullopt;
    value.note = j.contains("note") ? std::optional(j.at("note").get<std::string>()) : std::nullopt;
}

void to_json(Json& j, const AnalysisRecord& value) {
    j = Json{{"video_id", value.video_id},
             {"config_digest", value.config_digest},
             {"created_at", value.created_at},
             {"signals", value.signals},
             {"result", value.result},
             {"modules", value.modules}};
}

void from_json(const Json& j, AnalysisRecord& value) {
    value.video_id = j.at("video_id").get<std::string>();
    value.config_digest = j.at("config_digest").get<std::string>();
    value.created_at = j.at("created_at").get<std::string>();
    value.signals = j.at("signals").get<ModalitySignals>();
    value.result = j.at("result").get<CheckworthinessResult>();
    value.modules = j.at("modules").get<std::map<std::string, ModuleStatus>>();
}

std::string config_digest(const PipelineConfig& config) {
    Json models = Json::object();
    for (const auto& [name, ep] : config.endpoints) models[name] = ep.model;
    Json lexicons = Json::array();
    for (const auto& path : config.lexicon_paths) {
        std::string content_digest;
        try {
            content_digest = sha256_file(path);
        } catch (const Error&) {
            content_digest = "unreadable";
        }
        lexicons.push_back(content_digest);
    }
    const Json material{
        {"module_enabled", config.module_enabled},
        {"weights", config.weights},
        {"threshold", config.threshold},
        {"frame_sample_rate_hz", config.frame_sample_rate_hz},
        {"max_frames", config.max_frames},
        {"deepfake_trigger", config.deepfake_trigger},
        {"models", models},
        {"lexicons", lexicons},
        {"prompt", sha256_hex(backends::classification_prompt().text())},
    };
    return sha256_hex(material.dump()).substr(0, 32);
}

} // namespace shortcheck::service
