#include "shortcheck/backends/http.hpp"

#include <httplib.h>

#include "shortcheck/core/error.hpp"

namespace shortcheck::backends {

std::string op_path(std::string_view op) {
    return "/v1/" + std::string(op);
}

std::string backend_for_op(std::string_view op) {
    if (op == ops::kTranscribe) return std::string(backend_names::kTranscription);
    if (op == ops::kOcr) return std::string(backend_names::kOcr);
    if (op == ops::kCaption) return std::string(backend_names::kCaptioning);
    if (op == ops::kGenerate) return std::string(backend_names::kLlm);
    if (op == ops::kDeepfake) return std::string(backend_names::kDeepfake);
    if (op == ops::kDetectClaims) return std::string(backend_names::kClaimDetection);
    if (op == ops::kFactcheck) return std::string(backend_names::kFactcheck);
    return {};
}

Json make_envelope(std::string_view op, const std::string& model, Json input) {
    Json body = Json::object();
    body["op"] = std::string(op);
    body["model"] = model;
    body["input"] = std::move(input);
    return body;
}

BackendClient::BackendClient(BackendEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    // httplib wants scheme://host[:port]; any path in base_url becomes a prefix.
    const auto& url = endpoint_.base_url;
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    host_ = url.substr(0, path_start);
    if (path_start != std::string::npos) {
        prefix_ = url.substr(path_start);
        while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
}

Json BackendClient::call(std::string_view op, Json input) const {
    const std::string path = prefix_ + op_path(op);
    const std::string body = make_envelope(op, endpoint_.model, std::move(input)).dump();
    httplib::Headers headers;
    if (endpoint_.auth_token && !endpoint_.auth_token->empty()) {
        headers.emplace("Authorization", "Bearer " + *endpoint_.auth_token);
    }

    const auto sec = static_cast<time_t>(endpoint_.timeout_ms / 1000);
    const auto usec = static_cast<time_t>((endpoint_.timeout_ms % 1000) * 1000);
    const int attempts = 1 + std::max(0, endpoint_.max_retries);
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        httplib::Client client(host_);
        client.set_connection_timeout(sec, usec);
        client.set_read_timeout(sec, usec);
        client.set_write_timeout(sec, usec);
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_error = "connection error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            try {
                return Json::parse(res->body);
            } catch (const Json::exception& e) {
                throw Error(ErrorCode::BackendUnavailable,
                            endpoint_.name + ": malformed response body: " + std::string(e.what()));
            }
        }
        last_error = "HTTP " + std::to_string(res->status);
        if (res->status < 500 && res->status != 429) break;
    }
    throw Error(ErrorCode::BackendUnavailable, endpoint_.name + " " + std::string(op) + ": " + last_error);
}

} // namespace shortcheck::backends
