#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include "shortcheck/core/serialize.hpp"

namespace httplib {
class Server;
}

namespace shortcheck::backends {

struct MockReply {
    int status = 200;
    Json body = Json::object();
};

// Receives (op, full request envelope) and produces the reply.
using MockHandler = std::function<MockReply(const std::string& op, const Json& request)>;

/// Key of a recorded exchange: sha256 of "<path>\n<canonical request body>".
std::string request_digest(const std::string& path, const Json& request);

/// Recorded request -> response pairs, one file per request digest
/// (<dir>/<digest>.json holding {"model", "path", "response", "status"}).
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path dir);

    [[nodiscard]] std::optional<MockReply> lookup(const std::string& path, const Json& request) const;
    void record(const std::string& path, const Json& request, const MockReply& reply) const;
    [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

/// In-process HTTP backend on 127.0.0.1 with an ephemeral port. Serves every
/// op at POST /v1/{op}, counts requests per backend, and can mark a backend
/// down (HTTP 503). Used both as a scripted mock and, through
/// FixtureServer, to replay recorded responses offline.
class MockServer {
public:
    explicit MockServer(MockHandler handler);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    [[nodiscard]] std::string base_url() const;
    [[nodiscard]] int port() const { return port_; }

    // Requests received per backend name, including ones answered with errors.
    [[nodiscard]] int calls(const std::string& backend) const;
    [[nodiscard]] int total_calls() const;
    void reset_counters();

    void set_down(const std::string& backend, bool down = true);

    // When set, every exchange answered by the handler is also written here.
    void record_into(std::shared_ptr<FixtureStore> store);

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
    MockHandler handler_;
    mutable std::mutex mutex_;
    std::map<std::string, int> calls_;
    std::set<std::string> down_;
    std::shared_ptr<FixtureStore> recorder_;
};

/// Replays a FixtureStore. Requests without a recording get HTTP 404 with
/// {"error": "no recorded response", "digest": ...}, which the client treats
/// as a non-retryable failure.
class FixtureServer : public MockServer {
public:
    explicit FixtureServer(std::filesystem::path dir);
};

// Points every endpoint of `config` at `base_url`.
void point_endpoints_at(PipelineConfig& config, const std::string& base_url);

} // namespace shortcheck::backends
