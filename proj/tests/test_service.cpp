#include <doctest.h>

#include <atomic>
#include <csignal>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

#include "shortcheck/backends/http.hpp"
#include "shortcheck/backends/mock_server.hpp"
#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"
#include "shortcheck/service/jobs.hpp"
#include "shortcheck/service/pipeline.hpp"
#include "support.hpp"

using namespace shortcheck;
using namespace shortcheck::service;
using backends::FixtureServer;
using backends::FixtureStore;
using backends::MockReply;
using backends::MockServer;

namespace {

struct Rig {
    explicit Rig(const std::string& tag) : dir(tag), server(testing::recorded_dir()) {
        config = testing::test_config();
        backends::point_endpoints_at(config, server.base_url());
        store = std::make_shared<Store>(dir / "store");
    }

    Pipeline pipeline(const PipelineConfig& c) const {
        return Pipeline(c, store, std::make_shared<FrozenClock>());
    }

    testing::TempDir dir;
    FixtureServer server;
    PipelineConfig config;
    std::shared_ptr<Store> store;
};

// Replays recorded answers, letting `override` take some ops first.
backends::MockHandler recorded_except(std::function<std::optional<MockReply>(const std::string&, const Json&)> override) {
    auto recorded = std::make_shared<FixtureStore>(testing::recorded_dir());
    return [recorded, override](const std::string& op, const Json& req) {
        if (auto r = override(op, req)) return *r;
        if (auto r = recorded->lookup(backends::op_path(op), req)) return *r;
        return MockReply{404, Json{{"error", "no recording"}}};
    };
}

const ModuleStatus& status(const AnalysisRecord& r, std::string_view module) { return r.modules.at(std::string(module)); }

} // namespace

TEST_SUITE("service") {

TEST_CASE("worked example end to end") {
    Rig rig("e2e");
    auto pipeline = rig.pipeline(rig.config);
    const auto out = pipeline.analyze(testing::beirut_video().string());
    const auto& s = out.record.signals;
    CHECK_FALSE(out.cached);
    CHECK(s.overlay_text == std::optional<std::string>("Someone captured the | missile in the Beirut blast"));
    CHECK(s.transcript == std::optional<std::string>("إنه لأمر مخجل"));
    CHECK(s.transcript_lang == std::optional<std::string>("ar"));
    REQUIRE(s.video_summary);
    CHECK(s.video_summary->find("2020 Beirut blast") != std::string::npos);
    CHECK_FALSE(s.buzzword_detected());
    CHECK(s.transcript_verdict == SemanticClass::hostile);
    CHECK(s.summary_verdict == SemanticClass::contentious_issue);
    CHECK(s.overlay_verdict == SemanticClass::hostile);
    CHECK_FALSE(s.deepfake_score);
    CHECK(s.claim_results.empty());
    CHECK(out.record.result.label == Label::Checkworthy);
    CHECK(out.record.result.score == 3.0);
    CHECK(out.record.video_id == sha256_file(testing::beirut_video()));
    CHECK(out.record.created_at == "1970-01-01T00:00:00Z");
    CHECK(status(out.record, modules::kWeapon).status == ModuleState::disabled);
    for (const auto& m : {"transcript", "ocr", "summary", "deepfake", "buzzword", "fact_check", "classify", "ad_filter"}) {
        CAPTURE(m);
        CHECK(status(out.record, m).status == ModuleState::ok);
    }
    CHECK(canonical_serialize(out.record) == out.bytes);
}

TEST_CASE("second analysis is served from the store without backend calls") {
    Rig rig("cache");
    auto pipeline = rig.pipeline(rig.config);
    const auto first = pipeline.analyze(testing::beirut_video().string());
    CHECK(rig.server.total_calls() > 0);
    rig.server.reset_counters();
    const auto second = pipeline.analyze(testing::beirut_video().string());
    CHECK(second.cached);
    CHECK(rig.server.total_calls() == 0);
    CHECK(second.bytes == first.bytes);
    CHECK(*rig.store->record_bytes(first.record.video_id, pipeline.digest()) == first.bytes);

    // A fresh pipeline over the same store sees the same cache entry.
    auto again = rig.pipeline(rig.config);
    CHECK(again.analyze(testing::beirut_video().string()).cached);
    CHECK(rig.server.total_calls() == 0);
}

TEST_CASE("transcription outage degrades to the remaining signals") {
    Rig rig("degrade");
    rig.server.set_down("transcription");
    auto pipeline = rig.pipeline(rig.config);
    const auto out = pipeline.analyze(testing::beirut_video().string());
    const auto& t = status(out.record, modules::kTranscript);
    CHECK(t.status == ModuleState::failed);
    REQUIRE(t.error);
    CHECK(t.error->find("BackendUnavailable") != std::string::npos);
    CHECK_FALSE(out.record.signals.transcript);
    CHECK(out.record.signals.transcript_verdict == SemanticClass::unknown);
    CHECK(out.record.result.score == 2.0);
    CHECK(out.record.result.label == Label::Checkworthy);
    CHECK(is_consistent(out.record.result));
    CHECK(rig.server.calls("transcription") == 1 + rig.config.endpoints.at("transcription").max_retries);
}

TEST_CASE("every backend down still yields a record") {
    Rig rig("alldown");
    for (const auto& b : all_backends()) rig.server.set_down(b);
    auto config = rig.config;
    for (auto& [name, ep] : config.endpoints) ep.max_retries = 0;
    auto pipeline = rig.pipeline(config);
    const auto out = pipeline.analyze(testing::beirut_video().string());
    CHECK(out.record.result.label == Label::Not_Checkworthy);
    CHECK(out.record.result.score == 0.0);
    for (const auto& m : {"transcript", "ocr", "summary", "deepfake"}) {
        CAPTURE(m);
        CHECK(status(out.record, m).status == ModuleState::failed);
    }
}

TEST_CASE("fact-check outage leaves claims empty and marks the module failed") {
    Rig rig("factdown");
    MockServer scripted(recorded_except([](const std::string& op, const Json& req) -> std::optional<MockReply> {
        if (op == "detect_claims") {
            return MockReply{200, Json{{"labels", std::vector<bool>(req.at("input").at("sentences").size(), true)}}};
        }
        if (op == "factcheck") return MockReply{503, Json::object()};
        return std::nullopt;
    }));
    auto config = rig.config;
    backends::point_endpoints_at(config, scripted.base_url());
    config.endpoints["factcheck"].max_retries = 0;
    auto pipeline = rig.pipeline(config);
    const auto out = pipeline.analyze(testing::beirut_video().string());
    CHECK(status(out.record, modules::kFactCheck).status == ModuleState::failed);
    CHECK(out.record.signals.claim_results.empty());
    CHECK(out.record.result.score == 3.0);
    CHECK(scripted.calls("factcheck") >= 1);
}

TEST_CASE("refuted claims flow into the score") {
    Rig rig("refuted");
    MockServer scripted(recorded_except([](const std::string& op, const Json& req) -> std::optional<MockReply> {
        if (op == "detect_claims") {
            return MockReply{200, Json{{"labels", std::vector<bool>(req.at("input").at("sentences").size(), true)}}};
        }
        if (op == "factcheck") {
            return MockReply{200, Json{{"label", "false"}, {"evidence", {"https://factcheck.example/beirut"}}}};
        }
        return std::nullopt;
    }));
    auto config = rig.config;
    backends::point_endpoints_at(config, scripted.base_url());
    auto pipeline = rig.pipeline(config);
    const auto out = pipeline.analyze(testing::beirut_video().string());
    REQUIRE_FALSE(out.record.signals.claim_results.empty());
    CHECK(out.record.signals.claim_results[0].stance == Stance::refuted);
    CHECK(out.record.result.score == 5.0);
}

TEST_CASE("disabled modules make no requests") {
    Rig rig("disabled");
    auto config = rig.config;
    config.module_enabled["deepfake"] = false;
    config.module_enabled["fact_check"] = false;
    auto pipeline = rig.pipeline(config);
    const auto out = pipeline.analyze(testing::beirut_video().string());
    CHECK(status(out.record, modules::kDeepfake).status == ModuleState::disabled);
    CHECK(status(out.record, modules::kFactCheck).status == ModuleState::disabled);
    CHECK(rig.server.calls("deepfake") == 0);
    CHECK(rig.server.calls("claim_detection") == 0);
    CHECK(out.record.result.label == Label::Checkworthy);
}

TEST_CASE("changed config appends a new record next to the old one") {
    Rig rig("append");
    auto a = rig.pipeline(rig.config);
    const auto first = a.analyze(testing::beirut_video().string());
    auto changed = rig.config;
    changed.threshold = 4.0;
    auto b = rig.pipeline(changed);
    CHECK(b.digest() != a.digest());
    const auto second = b.analyze(testing::beirut_video().string());
    CHECK_FALSE(second.cached);
    CHECK(second.record.result.label == Label::Not_Checkworthy);
    CHECK(rig.store->digests_for(first.record.video_id).size() == 2);
    CHECK(*rig.store->record_bytes(first.record.video_id, a.digest()) == first.bytes);
}

TEST_CASE("config digest ignores endpoints and operational settings") {
    auto c = testing::test_config();
    const auto d = config_digest(c);
    CHECK(d.size() == 32);
    backends::point_endpoints_at(c, "http://elsewhere:9");
    c.endpoints["factcheck"].auth_token = "tok";
    c.endpoints["llm"].timeout_ms = 5;
    c.workers = 9;
    c.store_dir = "/x";
    c.decoder_path = "/y";
    CHECK(config_digest(c) == d);
    c.endpoints["llm"].model = "other-llm";
    CHECK(config_digest(c) != d);
    auto t = testing::test_config();
    t.deepfake_trigger = 0.6;
    CHECK(config_digest(t) != d);
    auto l = testing::test_config();
    l.lexicon_paths.clear();
    CHECK(config_digest(l) != d);
}

TEST_CASE("invalid configs are refused") {
    auto c = testing::test_config();
    c.threshold = -1;
    CHECK_THROWS_WITH_AS(Pipeline(c, std::make_shared<Store>(testing::TempDir("bad").path())),
                         doctest::Contains("InvalidConfig"), Error);
}

TEST_CASE("admission rejects long clips before any backend call") {
    Rig rig("admit");
    const auto clip = testing::synth_clip(rig.dir / "long.mp4", 660,
                                          {"--fps", "1", "--width", "32", "--height", "32", "--audio", "none"});
    auto pipeline = rig.pipeline(rig.config);
    CHECK_THROWS_WITH_AS(pipeline.admit(clip.string()), doctest::Contains("TooLong"), Error);
    CHECK_THROWS_WITH_AS(pipeline.analyze(clip.string()), doctest::Contains("TooLong"), Error);
    CHECK(pipeline.admit(testing::beirut_video().string()) == sha256_file(testing::beirut_video()));
    CHECK(rig.server.total_calls() == 0);
}

TEST_CASE("store is append-only") {
    testing::TempDir dir("store");
    Store store(dir.path());
    AnalysisRecord r;
    r.video_id = "v1";
    r.config_digest = "d1";
    r.created_at = "a";
    const auto first = store.put_record(r);
    r.created_at = "b";
    CHECK(store.put_record(r) == first);
    CHECK(store.record("v1", "d1")->created_at == "a");
    CHECK_FALSE(store.record_bytes("v1", "nope"));
    CHECK_FALSE(store.record_bytes("../etc", "d1"));
    r.video_id = "../x";
    CHECK_THROWS_AS(store.put_record(r), Error);

    const auto m1 = store.put_media("bytes", ".mp4");
    CHECK(store.put_media("bytes", "mp4") == m1);
    CHECK(m1.filename() == sha256_hex("bytes") + ".mp4");

    eval::EvalReport rep;
    rep.name = "x";
    store.put_report("r1", rep);
    CHECK_THROWS_AS(store.put_report("r1", rep), Error);
    CHECK(store.report_ids() == std::vector<std::string>{"r1"});
}

TEST_CASE("concurrent writers of one key agree on a single record") {
    testing::TempDir dir("race");
    Store store(dir.path());
    std::vector<std::thread> threads;
    std::vector<std::string> seen(16);
    for (int i = 0; i < 16; ++i) {
        threads.emplace_back([&, i] {
            AnalysisRecord r;
            r.video_id = "v";
            r.config_digest = "d";
            r.created_at = std::to_string(i);
            seen[i] = store.put_record(r);
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& s : seen) CHECK(s == seen[0]);
    CHECK(*store.record_bytes("v", "d") == seen[0]);
    int files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "records" / "v")) files += e.is_regular_file();
    CHECK(files == 1);
}

TEST_CASE("a writer killed mid-run never exposes a partial record") {
    testing::TempDir dir("kill");
    const pid_t child = ::fork();
    REQUIRE(child >= 0);
    if (child == 0) {
        Store store(dir.path());
        AnalysisRecord r;
        r.video_id = "v";
        r.signals.transcript = std::string(1 << 17, 'x');
        for (int i = 0; i < 500; ++i) {
            r.config_digest = "d" + std::to_string(i);
            store.put_record(r);
        }
        ::_exit(0);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(60));
    ::kill(child, SIGKILL);
    int wstatus = 0;
    ::waitpid(child, &wstatus, 0);
    Store store(dir.path());
    const auto digests = store.digests_for("v");
    CHECK(digests.size() > 0);
    for (const auto& d : digests) {
        CAPTURE(d);
        CHECK_NOTHROW((void)store.record("v", d));
    }
}

TEST_CASE("job queue: states, duplicates and failures") {
    JobQueue queue(2);
    std::atomic<bool> release{false};
    const auto a = queue.submit("vid", [&] {
        while (!release) std::this_thread::sleep_for(std::chrono::milliseconds(2));
    });
    CHECK_FALSE(a.duplicate);
    const auto dup = queue.submit("vid", [] {});
    CHECK(dup.duplicate);
    CHECK(dup.job_id == a.job_id);
    const auto bad = queue.submit("other", [] { throw Error(ErrorCode::TooLong, "too long"); });
    release = true;
    queue.wait_idle();
    CHECK(queue.get(a.job_id)->state == JobState::done);
    const auto failed = queue.get(bad.job_id);
    CHECK(failed->state == JobState::failed);
    CHECK(failed->error->find("TooLong") != std::string::npos);
    CHECK_FALSE(queue.get("job-999"));
    CHECK_FALSE(queue.submit("vid", [] {}).duplicate);
    queue.wait_idle();
}

TEST_CASE("job queue bounds concurrency") {
    JobQueue queue(3);
    std::atomic<int> running{0}, peak{0};
    for (int i = 0; i < 12; ++i) {
        (void)queue.submit("v" + std::to_string(i), [&] {
            const int now = ++running;
            int p = peak;
            while (now > p && !peak.compare_exchange_weak(p, now)) {}
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
            --running;
        });
    }
    queue.wait_idle();
    CHECK(peak <= 3);
    CHECK(peak >= 1);
}

} // TEST_SUITE
