#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "shortcheck/service/jobs.hpp"
#include "shortcheck/service/pipeline.hpp"

namespace httplib {
class Server;
}

namespace shortcheck::service {

struct ApiOptions {
    std::filesystem::path static_dir; // served at / when set (reviewer UI build)
};

/// HTTP API over a Pipeline (see docs/api.md for the request and response
/// bodies). Analyses run on a JobQueue sized by config.workers.
class ApiServer {
public:
    ApiServer(std::shared_ptr<Pipeline> pipeline, ApiOptions options = {});
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    // Binds host:port (port 0 picks a free one) and returns the bound port.
    int bind(const std::string& host, int port);
    // Serves until stop(); blocking.
    void listen();
    // bind() + listen() on a background thread.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();

    [[nodiscard]] JobQueue& jobs() { return *jobs_; }

private:
    void routes();

    std::shared_ptr<Pipeline> pipeline_;
    ApiOptions options_;
    std::unique_ptr<JobQueue> jobs_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

} // namespace shortcheck::service
