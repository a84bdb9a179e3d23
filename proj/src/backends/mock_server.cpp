#include "shortcheck/backends/mock_server.hpp"

#include <fstream>

#include <httplib.h>

#include "shortcheck/backends/http.hpp"
#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"

namespace shortcheck::backends {

namespace fs = std::filesystem;

std::string request_digest(const std::string& path, const Json& request) {
    return sha256_hex(path + "\n" + request.dump());
}

FixtureStore::FixtureStore(fs::path dir) : dir_(std::move(dir)) {}

std::optional<MockReply> FixtureStore::lookup(const std::string& path, const Json& request) const {
    const fs::path file = dir_ / (request_digest(path, request) + ".json");
    std::error_code ec;
    if (!fs::is_regular_file(file, ec)) return std::nullopt;
    try {
        const Json j = Json::parse(read_file(file));
        return MockReply{j.value("status", 200), j.at("response")};
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::Parse, file.string() + ": " + e.what());
    }
}

void FixtureStore::record(const std::string& path, const Json& request, const MockReply& reply) const {
    fs::create_directories(dir_);
    const Json entry{{"path", path},
                     {"model", request.value("model", std::string())},
                     {"status", reply.status},
                     {"response", reply.body}};
    const fs::path file = dir_ / (request_digest(path, request) + ".json");
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << entry.dump(2) << "\n";
    if (!out) throw Error(ErrorCode::Io, "cannot write " + file.string());
}

MockServer::MockServer(MockHandler handler)
    : server_(std::make_unique<httplib::Server>()), handler_(std::move(handler)) {
    server_->Post(R"(/v1/([a-z_]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string op = req.matches[1];
        const std::string backend = backend_for_op(op);
        std::shared_ptr<FixtureStore> recorder;
        {
            std::lock_guard lock(mutex_);
            ++calls_[backend.empty() ? op : backend];
            if (down_.count(backend)) {
                res.status = 503;
                res.set_content(R"({"error":"backend down"})", "application/json");
                return;
            }
            recorder = recorder_;
        }
        Json request;
        try {
            request = Json::parse(req.body);
        } catch (const Json::exception&) {
            res.status = 400;
            res.set_content(R"({"error":"request body is not JSON"})", "application/json");
            return;
        }
        MockReply reply;
        try {
            reply = handler_(op, request);
        } catch (const std::exception& e) {
            reply = MockReply{500, Json{{"error", e.what()}}};
        }
        if (recorder && reply.status < 500) recorder->record(op_path(op), request, reply);
        res.status = reply.status;
        res.set_content(reply.body.dump(), "application/json");
    });
    port_ = server_->bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw Error(ErrorCode::Io, "mock server cannot bind a port");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

MockServer::~MockServer() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string MockServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(port_);
}

int MockServer::calls(const std::string& backend) const {
    std::lock_guard lock(mutex_);
    auto it = calls_.find(backend);
    return it == calls_.end() ? 0 : it->second;
}

int MockServer::total_calls() const {
    std::lock_guard lock(mutex_);
    int total = 0;
    for (const auto& [_, n] : calls_) total += n;
    return total;
}

void MockServer::reset_counters() {
    std::lock_guard lock(mutex_);
    calls_.clear();
}

void MockServer::set_down(const std::string& backend, bool down) {
    std::lock_guard lock(mutex_);
    if (down) {
        down_.insert(backend);
    } else {
        down_.erase(backend);
    }
}

void MockServer::record_into(std::shared_ptr<FixtureStore> store) {
    std::lock_guard lock(mutex_);
    recorder_ = std::move(store);
}

FixtureServer::FixtureServer(fs::path dir)
    : MockServer([store = std::make_shared<FixtureStore>(std::move(dir))](const std::string& op,
                                                                          const Json& request) {
          const std::string path = op_path(op);
          if (auto hit = store->lookup(path, request)) return *hit;
          return MockReply{404, Json{{"error", "no recorded response"},
                                     {"digest", request_digest(path, request)}}};
      }) {}

void point_endpoints_at(PipelineConfig& config, const std::string& base_url) {
    for (auto& [_, ep] : config.endpoints) ep.base_url = base_url;
}

} // namespace shortcheck::backends
