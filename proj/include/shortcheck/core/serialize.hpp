#pragma once

// Canonical structured-text encoding for every domain type.
//
// Values are encoded as compact JSON. Object keys are emitted in sorted order
// and absent optionals are omitted, so equal values always produce identical
// bytes. parse<T>(canonical_serialize(x)) == x for every valid x.

#include <string>
#include <string_view>

#include <json.hpp>

#include "shortcheck/core/config.hpp"
#include "shortcheck/core/error.hpp"
#include "shortcheck/core/types.hpp"

namespace shortcheck {

using Json = nlohmann::json;

void to_json(Json& j, SemanticClass value);
void from_json(const Json& j, SemanticClass& value);
void to_json(Json& j, Label value);
void from_json(const Json& j, Label& value);
void to_json(Json& j, Stance value);
void from_json(const Json& j, Stance& value);
void to_json(Json& j, TextSource value);
void from_json(const Json& j, TextSource& value);

void to_json(Json& j, const VideoItem& value);
void from_json(const Json& j, VideoItem& value);
void to_json(Json& j, const Span& value);
void from_json(const Json& j, Span& value);
void to_json(Json& j, const BuzzwordHit& value);
void from_json(const Json& j, BuzzwordHit& value);
void to_json(Json& j, const ClaimCheckResult& value);
void from_json(const Json& j, ClaimCheckResult& value);
void to_json(Json& j, const ModalitySignals& value);
void from_json(const Json& j, ModalitySignals& value);
void to_json(Json& j, const Contribution& value);
void from_json(const Json& j, Contribution& value);
void to_json(Json& j, const CheckworthinessResult& value);
void from_json(const Json& j, CheckworthinessResult& value);
void to_json(Json& j, const BackendEndpoint& value);
void from_json(const Json& j, BackendEndpoint& value);
void to_json(Json& j, const PipelineConfig& value);
// Merges onto default_config(): keys absent from `j` keep their defaults.
void from_json(const Json& j, PipelineConfig& value);

template <typename T>
std::string canonical_serialize(const T& value) {
    return Json(value).dump();
}

template <typename T>
T parse(std::string_view text) {
    try {
        return Json::parse(text).get<T>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::Parse, e.what());
    }
}

} // namespace shortcheck
