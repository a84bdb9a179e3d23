#include <atomic>
#include <chrono>
#include <thread>

#include <doctest.h>

#include "shortcheck/backends/mock_server.hpp"
#include "shortcheck/claims/verifier.hpp"
#include "shortcheck/core/error.hpp"
#include "support.hpp"

using namespace shortcheck;
using namespace shortcheck::backends;
using namespace shortcheck::claims;

namespace {

BackendClient client_for(const MockServer& server, std::string_view name) {
    BackendEndpoint ep;
    ep.name = std::string(name);
    ep.base_url = server.base_url();
    ep.max_retries = 0;
    ep.timeout_ms = 5000;
    return BackendClient(ep);
}

} // namespace

TEST_SUITE("claims") {

TEST_CASE("sentence splitting") {
    CHECK(split_sentences("One claim. Two claims! Three?") ==
          std::vector<std::string>{"One claim.", "Two claims!", "Three?"});
    CHECK(split_sentences("  ").empty());
    CHECK(split_sentences("It's a shame") == std::vector<std::string>{"It's a shame"});
}

TEST_CASE("claim detection keeps labelled sentences in order") {
    bool all = true;
    MockServer server([&](const std::string&, const Json& req) {
        const auto n = req.at("input").at("sentences").size();
        std::vector<bool> labels(n, all);
        if (!all && n > 1) labels[1] = true;
        return MockReply{200, Json{{"labels", labels}}};
    });
    const auto client = client_for(server, "claim_detection");
    CHECK(detect_claims(client, "The port exploded in 2020. It killed 200 people. Ministers resigned.").size() == 3);
    all = false;
    CHECK(detect_claims(client, "It's a shame") .empty());
    CHECK(detect_claims(client, "A. B was 3. C.") == std::vector<std::string>{"B was 3."});
    CHECK_THROWS_WITH_AS(detect_claims(client, ""), doctest::Contains("EmptyInput"), Error);
    CHECK_THROWS_AS(detect_claims(client, " \n "), Error);
}

TEST_CASE("claim detection rejects replies of the wrong length") {
    MockServer server([](const std::string&, const Json&) { return MockReply{200, Json{{"labels", {true}}}}; });
    CHECK_THROWS_WITH_AS(detect_claims(client_for(server, "claim_detection"), "A is 1. B is 2."),
                         doctest::Contains("BackendUnavailable"), Error);
}

TEST_CASE("stance table") {
    CHECK(normalize_stance("Refuted") == Stance::refuted);
    CHECK(normalize_stance("pants-on-fire") == Stance::refuted);
    CHECK(normalize_stance("Mostly_True") == Stance::supported);
    CHECK(normalize_stance("half true") == Stance::disputed);
    CHECK(normalize_stance("NOT ENOUGH INFO") == Stance::no_evidence);
    CHECK(normalize_stance("contradiction") == Stance::refuted);
    CHECK_FALSE(normalize_stance("satire"));
}

TEST_CASE("zero claims make no request") {
    MockServer server([](const std::string&, const Json&) { return MockReply{200, Json::object()}; });
    CHECK(verify_claims(client_for(server, "factcheck"), {}).empty());
    CHECK(server.total_calls() == 0);
}

TEST_CASE("refuted claim keeps its evidence link") {
    MockServer server([](const std::string&, const Json&) {
        return MockReply{200, Json{{"label", "False"},
                                   {"evidence", Json::array({Json{{"url", "https://factcheck.example/beirut"}}})},
                                   {"confidence", 0.93}}};
    });
    const auto r = verify_claims(client_for(server, "factcheck"), {"A missile caused the Beirut blast."});
    REQUIRE(r.size() == 1);
    CHECK(r[0].stance == Stance::refuted);
    CHECK(r[0].evidence_refs == std::vector<std::string>{"https://factcheck.example/beirut"});
    CHECK(r[0].confidence == doctest::Approx(0.93));
    CHECK_FALSE(r[0].warning);
}

TEST_CASE("one failing claim out of five degrades only that claim") {
    MockServer server([](const std::string&, const Json& req) {
        const auto claim = req.at("input").at("claim").get<std::string>();
        if (claim == "c3") return MockReply{500, Json{{"error", "boom"}}};
        return MockReply{200, Json{{"label", claim == "c1" ? "supported" : "refuted"},
                                   {"evidence", Json::array({"https://e/" + claim})}}};
    });
    const std::vector<std::string> claims{"c0", "c1", "c2", "c3", "c4"};
    const auto r = verify_claims(client_for(server, "factcheck"), claims);
    REQUIRE(r.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(r[i].claim_text == claims[i]);
    CHECK(r[1].stance == Stance::supported);
    CHECK(r[3].stance == Stance::no_evidence);
    CHECK(r[3].warning);
    CHECK(r[3].evidence_refs.empty());
    int warned = 0;
    for (const auto& c : r) warned += c.warning ? 1 : 0;
    CHECK(warned == 1);
}

TEST_CASE("every claim failing fails the batch") {
    MockServer server([](const std::string&, const Json&) { return MockReply{503, Json::object()}; });
    CHECK_THROWS_WITH_AS(verify_claims(client_for(server, "factcheck"), {"a", "b"}),
                         doctest::Contains("BackendUnavailable"), Error);
}

TEST_CASE("unknown labels and missing evidence are downgraded") {
    MockServer server([](const std::string&, const Json& req) {
        const auto claim = req.at("input").at("claim").get<std::string>();
        if (claim == "satire") return MockReply{200, Json{{"label", "satire"}, {"evidence", {"https://e/1"}}}};
        if (claim == "bare") return MockReply{200, Json{{"label", "satire"}}};
        return MockReply{200, Json{{"label", "refuted"}, {"evidence", Json::array()}}};
    });
    const auto r = verify_claims(client_for(server, "factcheck"), {"satire", "bare", "noevidence"});
    CHECK(r[0].stance == Stance::disputed);
    CHECK(r[0].warning);
    CHECK(r[1].stance == Stance::no_evidence);
    CHECK(r[2].stance == Stance::no_evidence);
    CHECK(r[2].warning);
    for (const auto& c : r) CHECK(check_invariants(c).empty());
}

TEST_CASE("order is preserved under concurrent fan-out") {
    MockServer server([](const std::string&, const Json& req) {
        return MockReply{200, Json{{"label", "supported"}, {"evidence", {"https://e/" + req.at("input").at("claim").get<std::string>()}}}};
    });
    std::vector<std::string> claims;
    for (int i = 0; i < 24; ++i) claims.push_back("claim-" + std::to_string(i));
    const auto r = verify_claims(client_for(server, "factcheck"), claims);
    REQUIRE(r.size() == claims.size());
    for (std::size_t i = 0; i < claims.size(); ++i) {
        CHECK(r[i].claim_text == claims[i]);
        INFO(r[i].warning.value_or(""));
        REQUIRE(r[i].evidence_refs.size() == 1);
        CHECK(r[i].evidence_refs[0] == "https://e/" + claims[i]);
    }
}

TEST_CASE("fan-out keeps at most four requests in flight") {
    std::atomic<int> open{0};
    std::atomic<int> peak{0};
    MockServer server([&](const std::string&, const Json&) {
        const int now = ++open;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {}
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        --open;
        return MockReply{200, Json{{"label", "supported"}, {"evidence", Json::array({"https://e/x"})}}};
    });
    const std::vector<std::string> claims(12, "same claim");
    const auto r = verify_claims(client_for(server, "factcheck"), claims);
    CHECK(r.size() == 12);
    CHECK(peak.load() <= 4);
    CHECK(peak.load() >= 2);
}

} // TEST_SUITE
