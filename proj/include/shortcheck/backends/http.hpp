#pragma once

#include <string>
#include <string_view>

#include "shortcheck/core/config.hpp"
#include "shortcheck/core/serialize.hpp"

namespace shortcheck::backends {

// Operation names; each is served at POST {base_url}/v1/{op}.
namespace ops {
inline constexpr std::string_view kTranscribe = "transcribe";
inline constexpr std::string_view kOcr = "ocr";
inline constexpr std::string_view kCaption = "caption";
inline constexpr std::string_view kGenerate = "generate";
inline constexpr std::string_view kDeepfake = "deepfake";
inline constexpr std::string_view kDetectClaims = "detect_claims";
inline constexpr std::string_view kFactcheck = "factcheck";
} // namespace ops

std::string op_path(std::string_view op);
// Backend that serves `op`; empty for unknown ops.
std::string backend_for_op(std::string_view op);

/// Request body shared by every backend: {"input": ..., "model": ..., "op": ...}.
Json make_envelope(std::string_view op, const std::string& model, Json input);

/// One remote backend. Stateless apart from its endpoint description, so a
/// single instance may be used from several threads.
///
/// call() makes at most 1 + max_retries attempts. Connection failures, 5xx
/// and 429 are retried; any other non-2xx status fails immediately. Each
/// attempt is bounded by timeout_ms. Exhaustion raises BackendUnavailable.
class BackendClient {
public:
    explicit BackendClient(BackendEndpoint endpoint);

    [[nodiscard]] Json call(std::string_view op, Json input) const;
    [[nodiscard]] const BackendEndpoint& endpoint() const { return endpoint_; }

private:
    BackendEndpoint endpoint_;
    std::string host_;
    std::string prefix_;
};

} // namespace shortcheck::backends
