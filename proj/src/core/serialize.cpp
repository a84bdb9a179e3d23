#include "shortcheck/core/serialize.hpp"

namespace shortcheck {

namespace {

template <typename T>
void put_optional(Json& j, const char* key, const std::optional<T>& value) {
    if (value) j[key] = *value;
}

template <typename T>
void get_optional(const Json& j, const char* key, std::optional<T>& value) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        value = it->get<T>();
    } else {
        value.reset();
    }
}

template <typename T>
void get_if_present(const Json& j, const char* key, T& value) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        value = it->get<T>();
    }
}

[[noreturn]] void bad_token(const char* type, const Json& j) {
    throw Error(ErrorCode::Parse, std::string("invalid ") + type + " token " + j.dump());
}

} // namespace

void to_json(Json& j, SemanticClass value) { j = std::string(to_string(value)); }

void from_json(const Json& j, SemanticClass& value) {
    const auto text = j.get<std::string>();
    value = parse_semantic_class(text);
    if (text != to_string(value) && text != "contentious-issue") bad_token("SemanticClass", j);
}

void to_json(Json& j, Label value) { j = std::string(to_string(value)); }

void from_json(const Json& j, Label& value) {
    auto parsed = parse_label(j.get<std::string>());
    if (!parsed) bad_token("Label", j);
    value = *parsed;
}

void to_json(Json& j, Stance value) { j = std::string(to_string(value)); }

void from_json(const Json& j, Stance& value) {
    auto parsed = parse_stance(j.get<std::string>());
    if (!parsed) bad_token("Stance", j);
    value = *parsed;
}

void to_json(Json& j, TextSource value) { j = std::string(to_string(value)); }

void from_json(const Json& j, TextSource& value) {
    auto parsed = parse_text_source(j.get<std::string>());
    if (!parsed) bad_token("TextSource", j);
    value = *parsed;
}

void to_json(Json& j, const VideoItem& value) {
    j = Json::object();
    j["id"] = value.id;
    j["source"] = value.source;
    j["duration_s"] = value.duration_s;
    put_optional(j, "language_hint", value.language_hint);
    put_optional(j, "title", value.title);
    put_optional(j, "description", value.description);
}

void from_json(const Json& j, VideoItem& value) {
    value.id = j.at("id").get<std::string>();
    value.source = j.at("source").get<std::string>();
    value.duration_s = j.at("duration_s").get<double>();
    get_optional(j, "language_hint", value.language_hint);
    get_optional(j, "title", value.title);
    get_optional(j, "description", value.description);
}

void to_json(Json& j, const Span& value) { j = Json::array({value.begin, value.end}); }

void from_json(const Json& j, Span& value) {
    value.begin = j.at(0).get<std::size_t>();
    value.end = j.at(1).get<std::size_t>();
}

void to_json(Json& j, const BuzzwordHit& value) {
    j = Json{{"term", value.term}, {"surface", value.surface}, {"source", value.source}, {"span", value.span}};
}

void from_json(const Json& j, BuzzwordHit& value) {
    value.term = j.at("term").get<std::string>();
    value.surface = j.at("surface").get<std::string>();
    value.source = j.at("source").get<TextSource>();
    value.span = j.at("span").get<Span>();
}

void to_json(Json& j, const ClaimCheckResult& value) {
    j = Json{{"claim_text", value.claim_text},
             {"stance", value.stance},
             {"evidence_refs", value.evidence_refs},
             {"confidence", value.confidence}};
    put_optional(j, "warning", value.warning);
}

void from_json(const Json& j, ClaimCheckResult& value) {
    value.claim_text = j.at("claim_text").get<std::string>();
    value.stance = j.at("stance").get<Stance>();
    value.evidence_refs = j.value("evidence_refs", std::vector<std::string>{});
    value.confidence = j.value("confidence", 0.0);
    get_optional(j, "warning", value.warning);
}

void to_json(Json& j, const ModalitySignals& value) {
    j = Json::object();
    put_optional(j, "transcript", value.transcript);
    put_optional(j, "transcript_lang", value.transcript_lang);
    put_optional(j, "overlay_text", value.overlay_text);
    put_optional(j, "video_summary", value.video_summary);
    j["transcript_verdict"] = value.transcript_verdict;
    j["summary_verdict"] = value.summary_verdict;
    j["overlay_verdict"] = value.overlay_verdict;
    j["buzzword_hits"] = value.buzzword_hits;
    j["buzzword_detected"] = value.buzzword_detected();
    put_optional(j, "deepfake_score", value.deepfake_score);
    j["claim_results"] = value.claim_results;
    j["is_advertisement"] = value.is_advertisement;
    put_optional(j, "weapon_detected", value.weapon_detected);
}

void from_json(const Json& j, ModalitySignals& value) {
    value = ModalitySignals{};
    get_optional(j, "transcript", value.transcript);
    get_optional(j, "transcript_lang", value.transcript_lang);
    get_optional(j, "overlay_text", value.overlay_text);
    get_optional(j, "video_summary", value.video_summary);
    get_if_present(j, "transcript_verdict", value.transcript_verdict);
    get_if_present(j, "summary_verdict", value.summary_verdict);
    get_if_present(j, "overlay_verdict", value.overlay_verdict);
    get_if_present(j, "buzzword_hits", value.buzzword_hits);
    get_optional(j, "deepfake_score", value.deepfake_score);
    get_if_present(j, "claim_results", value.claim_results);
    get_if_present(j, "is_advertisement", value.is_advertisement);
    get_optional(j, "weapon_detected", value.weapon_detected);
}

void to_json(Json& j, const Contribution& value) {
    j = Json{{"signal", value.signal}, {"weight", value.weight}, {"rationale", value.rationale}};
}

void from_json(const Json& j, Contribution& value) {
    value.signal = j.at("signal").get<std::string>();
    value.weight = j.at("weight").get<double>();
    value.rationale = j.at("rationale").get<std::string>();
}

void to_json(Json& j, const CheckworthinessResult& value) {
    j = Json{{"label", value.label},
             {"score", value.score},
             {"threshold", value.threshold},
             {"contributions", value.contributions},
             {"ad_override", value.ad_override}};
}

void from_json(const Json& j, CheckworthinessResult& value) {
    value.label = j.at("label").get<Label>();
    value.score = j.at("score").get<double>();
    value.threshold = j.at("threshold").get<double>();
    value.contributions = j.at("contributions").get<std::vector<Contribution>>();
    value.ad_override = j.at("ad_override").get<bool>();
}

void to_json(Json& j, const BackendEndpoint& value) {
    j = Json{{"base_url", value.base_url},
             {"timeout_ms", value.timeout_ms},
             {"max_retries", value.max_retries},
             {"model", value.model}};
    put_optional(j, "auth_token_env", value.auth_token_env);
}

void from_json(const Json& j, BackendEndpoint& value) {
    get_if_present(j, "base_url", value.base_url);
    get_if_present(j, "timeout_ms", value.timeout_ms);
    get_if_present(j, "max_retries", value.max_retries);
    get_if_present(j, "model", value.model);
    get_optional(j, "auth_token_env", value.auth_token_env);
}

void to_json(Json& j, const PipelineConfig& value) {
    j = Json::object();
    j["module_enabled"] = value.module_enabled;
    j["weights"] = value.weights;
    j["threshold"] = value.threshold;
    j["frame_sample_rate_hz"] = value.frame_sample_rate_hz;
    j["max_frames"] = value.max_frames;
    Json endpoints = Json::object();
    for (const auto& [name, ep] : value.endpoints) endpoints[name] = ep;
    j["endpoints"] = std::move(endpoints);
    j["lexicon_paths"] = value.lexicon_paths;
    j["deepfake_trigger"] = value.deepfake_trigger;
    j["decoder_path"] = value.decoder_path;
    j["store_dir"] = value.store_dir;
    j["workers"] = value.workers;
    j["max_upload_bytes"] = value.max_upload_bytes;
}

void from_json(const Json& j, PipelineConfig& value) {
    value = default_config();
    if (auto it = j.find("module_enabled"); it != j.end()) {
        for (const auto& [name, on] : it->items()) value.module_enabled[name] = on.get<bool>();
    }
    if (auto it = j.find("weights"); it != j.end()) {
        for (const auto& [name, w] : it->items()) value.weights[name] = w.get<double>();
    }
    get_if_present(j, "threshold", value.threshold);
    get_if_present(j, "frame_sample_rate_hz", value.frame_sample_rate_hz);
    get_if_present(j, "max_frames", value.max_frames);
    if (auto it = j.find("endpoints"); it != j.end()) {
        for (const auto& [name, ep_json] : it->items()) {
            auto& ep = value.endpoints[name];
            ep.name = name;
            from_json(ep_json, ep);
        }
    }
    get_if_present(j, "lexicon_paths", value.lexicon_paths);
    get_if_present(j, "deepfake_trigger", value.deepfake_trigger);
    get_if_present(j, "decoder_path", value.decoder_path);
    get_if_present(j, "store_dir", value.store_dir);
    get_if_present(j, "workers", value.workers);
    get_if_present(j, "max_upload_bytes", value.max_upload_bytes);
}

} // namespace shortcheck
