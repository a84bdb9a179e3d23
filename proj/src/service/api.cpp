#include "shortcheck/service/api.hpp"

#include <httplib.h>

#include "shortcheck/core/error.hpp"
#include "shortcheck/core/serialize.hpp"

namespace shortcheck::service {

namespace fs = std::filesystem;

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, std::string_view reason, const std::string& message) {
    reply(res, status, Json{{"reason", std::string(reason)}, {"message", message}});
}

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::TooLong:
    case ErrorCode::Unreadable:
    case ErrorCode::Unsupported: return 422;
    case ErrorCode::BadRequest:
    case ErrorCode::Parse: return 400;
    case ErrorCode::NotFound: return 404;
    default: return 500;
    }
}

std::string extension_of(const std::string& filename) {
    const auto ext = fs::path(filename).extension().string();
    return ext.size() > 1 && ext.size() <= 8 ? ext : std::string();
}

} // namespace

ApiServer::ApiServer(std::shared_ptr<Pipeline> pipeline, ApiOptions options)
    : pipeline_(std::move(pipeline)),
      options_(std::move(options)),
      jobs_(std::make_unique<JobQueue>(pipeline_->config().workers)),
      server_(std::make_unique<httplib::Server>()) {
    routes();
}

ApiServer::~ApiServer() {
    stop();
    jobs_.reset();
}

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    if (!server_->bind_to_port(host, port)) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void ApiServer::listen() {
    server_->listen_after_bind();
}

int ApiServer::start(const std::string& host, int port) {
    const int bound = bind(host, port);
    if (bound <= 0) throw Error(ErrorCode::Io, "cannot bind " + host);
    thread_ = std::thread([this] { listen(); });
    server_->wait_until_ready();
    return bound;
}

void ApiServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

void ApiServer::routes() {
    auto& srv = *server_;
    srv.set_payload_max_length(pipeline_->config().max_upload_bytes);
    srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        if (res.status == 413) {
            fail(res, 413, "PayloadTooLarge", "upload exceeds the configured size limit");
        } else if (res.status == 404) {
            fail(res, 404, "NotFound", "no such resource");
        }
    });

    srv.Post("/videos", [this](const httplib::Request& req, httplib::Response& res) {
        std::string source;
        std::optional<std::string> language;
        try {
            if (req.has_file("file")) {
                const auto file = req.get_file_value("file");
                if (file.content.empty()) return fail(res, 400, "BadRequest", "empty upload");
                source = pipeline_->store().put_media(file.content, extension_of(file.filename)).string();
                if (req.has_file("language")) language = req.get_file_value("language").content;
            } else {
                const Json body = Json::parse(req.body);
                source = body.at("url").get<std::string>();
                if (body.contains("language")) language = body.at("language").get<std::string>();
            }
        } catch (const Json::exception&) {
            return fail(res, 400, "BadRequest", "expected a multipart 'file' field or a JSON body with 'url'");
        }

        std::string video_id;
        try {
            video_id = pipeline_->admit(source);
        } catch (const Error& e) {
            return fail(res, status_for(e.code()), to_string(e.code()), e.what());
        }

        auto pipeline = pipeline_;
        const auto submitted = jobs_->submit(video_id, [pipeline, source, language] {
            pipeline->analyze(source, language);
        });
        if (submitted.duplicate) {
            return reply(res, 409, Json{{"reason", "DuplicateJob"},
                                        {"message", "an analysis of this video is already queued or running"},
                                        {"job_id", submitted.job_id},
                                        {"video_id", video_id}});
        }
        reply(res, 202, Json{{"video_id", video_id}, {"job_id", submitted.job_id}});
    });

    srv.Get(R"(/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const auto job = jobs_->get(req.matches[1]);
        if (!job) return fail(res, 404, "NotFound", "unknown job");
        Json body{{"job_id", job->id}, {"video_id", job->video_id}, {"status", std::string(to_string(job->state))}};
        if (job->error) body["error"] = *job->error;
        reply(res, 200, body);
    });

    srv.Get(R"(/videos/([^/]+)/analysis)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto bytes = pipeline_->store().record_bytes(req.matches[1], pipeline_->digest());
        if (!bytes) return fail(res, 404, "NotFound", "no analysis for this video under the active config");
        res.status = 200;
        res.set_content(*bytes, "application/json");
    });

    srv.Get(R"(/videos/([^/]+)/factchecks)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const auto record = pipeline_->store().record(id, pipeline_->digest());
        if (!record) return fail(res, 404, "NotFound", "no analysis for this video under the active config");
        const auto& status = record->modules.at(std::string(modules::kFactCheck));
        reply(res, 200, Json{{"video_id", id},
                             {"status", std::string(to_string(status.status))},
                             {"claim_results", record->signals.claim_results}});
    });

    srv.Get("/eval/reports", [this](const httplib::Request&, httplib::Response& res) {
        Json list = Json::array();
        for (const auto& id : pipeline_->store().report_ids()) {
            const auto report = pipeline_->store().report(id);
            if (!report) continue;
            list.push_back(Json{{"id", id},
                                {"name", report->name},
                                {"n", report->n},
                                {"accuracy", report->accuracy},
                                {"macro_f1", report->macro.f1},
                                {"weighted_f1", report->weighted_f1},
                                {"skipped", report->skipped.size()}});
        }
        reply(res, 200, Json{{"reports", list}});
    });

    srv.Get(R"(/eval/reports/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const auto report = pipeline_->store().report(req.matches[1]);
        if (!report) return fail(res, 404, "NotFound", "unknown report");
        reply(res, 200, Json(*report));
    });

    srv.Get(R"(/eval/reports/([^/]+)/confusion)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const auto report = pipeline_->store().report(id);
        if (!report) return fail(res, 404, "NotFound", "unknown report");
        const Label labels[] = {Label::Checkworthy, Label::Not_Checkworthy};
        Json cells = Json::array();
        for (Label gold : labels) {
            for (Label pred : labels) {
                Json ids = Json::array();
                for (const auto& p : report->predictions) {
                    if (p.gold == gold && p.pred == pred) ids.push_back(p.video_id);
                }
                cells.push_back(Json{{"gold", gold},
                                     {"pred", pred},
                                     {"count", report->confusion[eval::index_of(gold)][eval::index_of(pred)]},
                                     {"video_ids", ids}});
            }
        }
        reply(res, 200, Json{{"id", id},
                             {"n", report->n},
                             {"labels", Json::array({"Checkworthy", "Not_Checkworthy"})},
                             {"matrix", report->confusion},
                             {"cells", cells}});
    });

    srv.Get("/config", [this](const httplib::Request&, httplib::Response& res) {
        res.status = 200;
        res.set_content(redacted_text(pipeline_->config()), "application/json");
    });

    if (!options_.static_dir.empty()) srv.set_mount_point("/", options_.static_dir.string());
}

} // namespace shortcheck::service
