#include <doctest.h>

#include <algorithm>

#include "shortcheck/core/config.hpp"
#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/serialize.hpp"
#include "shortcheck/service/record.hpp"
#include "support.hpp"

using namespace shortcheck;

TEST_SUITE("core") {

TEST_CASE("enum tokens are the exact wire strings") {
    CHECK(Json(SemanticClass::hostile).dump() == "\"hostile\"");
    CHECK(Json(SemanticClass::contentious_issue).dump() == "\"contentious_issue\"");
    CHECK(Json(Label::Not_Checkworthy).dump() == "\"Not_Checkworthy\"");
    CHECK(Json(Stance::no_evidence).dump() == "\"no_evidence\"");
    CHECK(Json(TextSource::overlay).dump() == "\"overlay\"");
    CHECK_THROWS_AS(parse<SemanticClass>("\"Hostile\""), Error);
}

TEST_CASE("verdict parsing takes the earliest class token") {
    CHECK(parse_semantic_class("Hostile.") == SemanticClass::hostile);
    CHECK(parse_semantic_class("  contentious-issue ") == SemanticClass::contentious_issue);
    CHECK(parse_semantic_class("Contentious Issue") == SemanticClass::contentious_issue);
    CHECK(parse_semantic_class("benign, though political undertones") == SemanticClass::benign);
    CHECK(parse_semantic_class("I cannot tell") == SemanticClass::unknown);
    CHECK(parse_semantic_class("") == SemanticClass::unknown);
}

TEST_CASE("verdict parsing is total over arbitrary strings") {
    testing::Gen gen(11);
    for (int i = 0; i < 5000; ++i) {
        std::string s;
        const int n = gen.uniform_int(0, 40);
        for (int k = 0; k < n; ++k) s.push_back(static_cast<char>(gen.uniform_int(0, 255)));
        if (gen.coin(0.3)) s += gen.pick(std::vector<std::string>{"HOSTILE", "benign", "Political", "promo"});
        const auto c = parse_semantic_class(s);
        CHECK(parse<SemanticClass>(Json(c).dump()) == c);
    }
}

TEST_CASE("round-trip of generated signals is byte-stable") {
    testing::Gen gen(1);
    for (int i = 0; i < 2000; ++i) {
        const ModalitySignals s = gen.signals();
        const std::string bytes = canonical_serialize(s);
        const auto back = parse<ModalitySignals>(bytes);
        REQUIRE(back == s);
        CHECK(canonical_serialize(back) == bytes);
    }
}

TEST_CASE("round-trip of results, configs and records") {
    testing::Gen gen(2);
    for (int i = 0; i < 500; ++i) {
        CheckworthinessResult r;
        r.label = gen.label();
        r.threshold = gen.uniform(0.1, 4);
        for (int k = gen.uniform_int(0, 6); k > 0; --k) {
            r.contributions.push_back(Contribution{"verdict.summary", gen.uniform(0, 3), gen.text(10)});
            r.score += r.contributions.back().weight;
        }
        r.ad_override = gen.coin();
        CHECK(parse<CheckworthinessResult>(canonical_serialize(r)) == r);

        const PipelineConfig c = gen.config();
        CHECK(parse<PipelineConfig>(canonical_serialize(c)) == c);

        service::AnalysisRecord rec;
        rec.video_id = sha256_hex(std::to_string(i));
        rec.config_digest = "d";
        rec.created_at = "2024-01-01T00:00:00Z";
        rec.signals = gen.signals();
        rec.result = r;
        rec.modules["transcript"] = service::ModuleStatus{service::ModuleState::failed, 12, "boom", std::nullopt};
        rec.modules["ocr"] = service::ModuleStatus{service::ModuleState::ok, 3, std::nullopt, "n"};
        const auto bytes = canonical_serialize(rec);
        CHECK(parse<service::AnalysisRecord>(bytes) == rec);
        CHECK(canonical_serialize(parse<service::AnalysisRecord>(bytes)) == bytes);

        VideoItem v{rec.video_id, gen.text(), gen.coin() ? std::optional<std::string>("no") : std::nullopt,
                    gen.uniform(0, 600), std::nullopt, gen.coin() ? std::optional<std::string>(gen.text()) : std::nullopt};
        CHECK(parse<VideoItem>(canonical_serialize(v)) == v);
    }
}

TEST_CASE("key order of the input does not change canonical bytes") {
    const std::string a =
        R"({"transcript":"t","overlay_text":"o","transcript_verdict":"hostile","deepfake_score":0.25})";
    const std::string b =
        R"({"deepfake_score":0.25,"transcript_verdict":"hostile","overlay_text":"o","transcript":"t"})";
    CHECK(canonical_serialize(parse<ModalitySignals>(a)) == canonical_serialize(parse<ModalitySignals>(b)));

    PipelineConfig x = default_config();
    PipelineConfig y = default_config();
    x.weights.clear();
    y.weights.clear();
    for (const auto& s : all_signals()) x.weights[s] = 1.5;
    auto names = all_signals();
    std::reverse(names.begin(), names.end());
    for (const auto& s : names) y.weights[s] = 1.5;
    CHECK(canonical_serialize(x) == canonical_serialize(y));
}

TEST_CASE("absent optionals are omitted") {
    const auto bytes = canonical_serialize(ModalitySignals{});
    CHECK(bytes.find("transcript\"") == std::string::npos);
    CHECK(bytes.find("deepfake_score") == std::string::npos);
    CHECK(bytes.find("\"transcript_verdict\":\"unknown\"") != std::string::npos);
}

TEST_CASE("config validation") {
    CHECK(validate(default_config()).empty());

    PipelineConfig c = default_config();
    c.threshold = 0;
    CHECK(validate(c) == std::vector<std::string>{"threshold must be > 0"});

    c = default_config();
    c.weights["buzzword"] = -1;
    const auto v = validate(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("weights.buzzword") != std::string::npos);

    c = default_config();
    c.module_enabled["telepathy"] = true;
    c.max_frames = 0;
    c.deepfake_trigger = 1.5;
    CHECK(validate(c).size() == 3);
}

TEST_CASE("config text keeps defaults for absent keys and rejects garbage") {
    const auto c = config_from_text(R"({"threshold": 3, "weights": {"buzzword": 2}})");
    CHECK(c.threshold == 3);
    CHECK(c.weight("buzzword") == 2);
    CHECK(c.weight("claim.refuted") == 2);
    CHECK(c.frame_sample_rate_hz == default_config().frame_sample_rate_hz);
    CHECK_THROWS_AS(config_from_text("{not json"), Error);
}

TEST_CASE("redacted config hides tokens") {
    PipelineConfig c = default_config();
    c.endpoints["factcheck"].auth_token = "s3cret-token";
    const auto text = redacted_text(c);
    CHECK(text.find("s3cret-token") == std::string::npos);
    CHECK(text.find("\"auth_token\":\"***\"") != std::string::npos);
    CHECK(canonical_serialize(c).find("s3cret-token") == std::string::npos);
}

TEST_CASE("default weights and modules") {
    const auto c = default_config();
    CHECK(c.threshold == 2.0);
    CHECK(c.weight("claim.refuted") == 2.0);
    CHECK(c.weight("weapon") == 0.0);
    CHECK_FALSE(c.enabled("weapon"));
    CHECK(c.enabled("ad_filter"));
    CHECK(c.deepfake_trigger == 0.5);
    CHECK(c.frame_sample_rate_hz == 0.5);
    CHECK(c.max_frames == 32);
}

TEST_CASE("claim invariants") {
    ClaimCheckResult c{"x", Stance::refuted, {}, 0.5, std::nullopt};
    CHECK_FALSE(check_invariants(c).empty());
    c.evidence_refs = {"https://e"};
    CHECK(check_invariants(c).empty());
    c.confidence = 1.5;
    CHECK_FALSE(check_invariants(c).empty());
}

TEST_CASE("digests") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(base64_encode("foobar") == "Zm9vYmFy");
    CHECK(base64_encode("fo") == "Zm8=");
    CHECK(base64_decode("Zm9vYg==") == "foob");
}

} // TEST_SUITE
