#include <doctest.h>

#include <sstream>

#include "properties.hpp"
#include "shortcheck/decision/engine.hpp"
#include "support.hpp"

using namespace shortcheck;
using namespace shortcheck::decision;

namespace {

ModalitySignals worked_example() {
    ModalitySignals s;
    s.transcript = "إنه لأمر مخجل";
    s.overlay_text = "Someone captured the | missile in the Beirut blast";
    s.video_summary = "The video captures footage of the 2020 Beirut blast.";
    s.transcript_verdict = SemanticClass::hostile;
    s.summary_verdict = SemanticClass::contentious_issue;
    s.overlay_verdict = SemanticClass::hostile;
    return s;
}

int count_lines_with(const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    int n = 0;
    for (std::string line; std::getline(in, line);) n += line.find(needle) != std::string::npos ? 1 : 0;
    return n;
}

} // namespace

TEST_SUITE("decision") {

TEST_CASE("worked example scores 3 and is check-worthy") {
    const auto r = score(worked_example(), default_config());
    CHECK(r.score == 3.0);
    CHECK(r.threshold == 2.0);
    CHECK(r.label == Label::Checkworthy);
    CHECK_FALSE(r.ad_override);
    const auto text = explain(r);
    CHECK(count_lines_with(text, "verdict.") == 3);
    CHECK(text.rfind("label: Checkworthy\n", 0) == 0);
    CHECK(text.find("disabled: weapon") != std::string::npos);
}

TEST_CASE("empty signals score zero") {
    ModalitySignals s;
    s.transcript_verdict = s.summary_verdict = s.overlay_verdict = SemanticClass::benign;
    const auto r = score(s, default_config());
    CHECK(r.score == 0.0);
    CHECK(r.label == Label::Not_Checkworthy);
    CHECK(explain(r).find("no signals fired") != std::string::npos);
}

TEST_CASE("advertisement override") {
    auto s = worked_example();
    s.is_advertisement = true;
    const auto r = score(s, default_config());
    CHECK(r.label == Label::Not_Checkworthy);
    CHECK(r.ad_override);
    CHECK(r.score == 3.0);
    CHECK(explain(r).rfind("ADVERTISEMENT OVERRIDE", 0) == 0);

    auto config = default_config();
    config.module_enabled["ad_filter"] = false;
    CHECK(score(s, config).label == Label::Checkworthy);
}

TEST_CASE("a single refuted claim reaches the threshold") {
    ModalitySignals s;
    s.claim_results.push_back(ClaimCheckResult{"c", Stance::refuted, {"https://e"}, 0.9, std::nullopt});
    const auto r = score(s, default_config());
    CHECK(r.score == 2.0);
    CHECK(r.label == Label::Checkworthy);

    s.claim_results[0].stance = Stance::supported;
    CHECK(score(s, default_config()).score == 1.0);
}

TEST_CASE("promotional verdicts contribute nothing") {
    ModalitySignals s;
    s.transcript_verdict = s.summary_verdict = s.overlay_verdict = SemanticClass::promotional;
    CHECK(score(s, default_config()).score == 0.0);
}

TEST_CASE("deepfake trigger is inclusive") {
    ModalitySignals s;
    s.deepfake_score = 0.5;
    CHECK(score(s, default_config()).score == 1.0);
    s.deepfake_score = 0.4999;
    CHECK(score(s, default_config()).score == 0.0);
}

TEST_CASE("disabled modules are listed with weight 0") {
    auto config = default_config();
    config.module_enabled["buzzword"] = false;
    auto s = worked_example();
    s.buzzword_hits.push_back(BuzzwordHit{"stem frp", "Stem FRP", TextSource::overlay, {0, 8}});
    const auto r = score(s, config);
    CHECK(r.score == 3.0);
    bool listed = false;
    for (const auto& c : r.contributions) {
        if (c.signal == "buzzword") listed = c.weight == 0.0 && c.rationale == "disabled";
    }
    CHECK(listed);
    CHECK(explain(r).find("disabled: buzzword, weapon") != std::string::npos);
}

TEST_CASE("explain output is a stable golden") {
    auto s = worked_example();
    s.buzzword_hits.push_back(BuzzwordHit{"stem frp", "Stem FRP", TextSource::overlay, {0, 8}});
    s.deepfake_score = 0.75;
    CHECK(explain(score(s, default_config())) ==
          "label: Checkworthy\n"
          "score: 5 (threshold 2, met)\n"
          "contributions:\n"
          "  verdict.transcript +1  transcript verdict is hostile\n"
          "  verdict.summary +1  summary verdict is contentious_issue\n"
          "  verdict.overlay +1  overlay verdict is hostile\n"
          "  buzzword +1  1 buzzword hit(s): \"stem frp\"\n"
          "  deepfake +1  deepfake score 0.75 >= trigger 0.5\n"
          "disabled: weapon\n");
}

TEST_CASE("property: ledger conservation") {
    const auto r = testing::ledger_conservation(101, 10000);
    CHECK_MESSAGE(r.ok(), r.first_failure);
}

TEST_CASE("property: ad override dominance") {
    const auto r = testing::ad_override_dominance(102, 10000);
    CHECK_MESSAGE(r.ok(), r.first_failure);
}

TEST_CASE("property: monotonicity under added signals") {
    const auto r = testing::monotonicity(103, 10000);
    CHECK_MESSAGE(r.ok(), r.first_failure);
}

TEST_CASE("property: determinism") {
    const auto r = testing::determinism(104, 10000);
    CHECK_MESSAGE(r.ok(), r.first_failure);
}

TEST_CASE("property: disabling a module equals clearing its signals") {
    const auto r = testing::module_removal_equivalence(105, 10000);
    CHECK_MESSAGE(r.ok(), r.first_failure);
}

TEST_CASE("consistency check catches tampered results") {
    auto r = score(worked_example(), default_config());
    CHECK(is_consistent(r));
    r.score = 2.5;
    CHECK_FALSE(is_consistent(r));
    r = score(worked_example(), default_config());
    r.label = Label::Not_Checkworthy;
    CHECK_FALSE(is_consistent(r));
}

} // TEST_SUITE
