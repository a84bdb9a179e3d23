#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "shortcheck/buzzword/detector.hpp"
#include "shortcheck/core/error.hpp"
#include "support.hpp"

using namespace shortcheck;
using namespace shortcheck::buzzword;

namespace {

const std::vector<Lexicon>& sample() {
    static const auto lex = load_lexicons(testing::fixtures_dir() / "lexicons" / "sample.jsonl");
    return lex;
}

std::multiset<std::pair<std::string, TextSource>> term_multiset(const std::vector<BuzzwordHit>& hits) {
    std::multiset<std::pair<std::string, TextSource>> out;
    for (const auto& h : hits) out.emplace(h.term, h.source);
    return out;
}

std::string upper(const std::string& s) {
    static const std::vector<std::pair<std::string, std::string>> kMap{{"ø", "Ø"}, {"å", "Å"}, {"æ", "Æ"}};
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
        bool mapped = false;
        for (const auto& [lo, up] : kMap) {
            if (s.compare(i, lo.size(), lo) == 0) {
                out += up;
                i += lo.size();
                mapped = true;
                break;
            }
        }
        if (!mapped) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(s[i++]))));
    }
    return out;
}

// Code point substring, used to check that spans point at the surface form.
std::string cp_substr(const std::string& s, std::size_t begin, std::size_t end) {
    std::size_t cp = 0;
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
        std::size_t len = 1;
        const auto c = static_cast<unsigned char>(s[i]);
        if (c >= 0xF0) len = 4;
        else if (c >= 0xE0) len = 3;
        else if (c >= 0xC0) len = 2;
        if (cp >= begin && cp < end) out += s.substr(i, len);
        i += len;
        ++cp;
    }
    return out;
}

std::vector<std::string> plain_terms(MatchMode mode) {
    std::vector<std::string> out;
    for (const auto& lex : sample()) {
        for (const auto& e : lex.entries) {
            if (e.match_mode == mode) out.push_back(e.term);
        }
    }
    return out;
}

const std::vector<std::string> kFiller{"og", "the", "video", "viser", "a", "i", "dag", "news", "stem", "state",
                                       "deep", "frp", "nei", "eu", "wall", "plan", "sheep", "global"};

} // namespace

TEST_SUITE("buzzword") {

TEST_CASE("normalization") {
    CHECK(normalize("STEM  FRP") == "stem frp");
    CHECK(normalize("Café") == "café");
    CHECK(normalize("  Norge\tFØRST \n") == "norge først");
    CHECK(normalize("ﬁne") == "fine");
    testing::Gen gen(7);
    for (int i = 0; i < 2000; ++i) {
        const auto s = gen.text(30);
        CHECK(normalize(normalize(s)) == normalize(s));
    }
}

TEST_CASE("worked example and boundary examples") {
    const auto hits = detect("Stem FRP nå!", TextSource::overlay, sample());
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].term == "stem frp");
    CHECK(hits[0].surface == "Stem FRP");
    CHECK(hits[0].source == TextSource::overlay);
    CHECK(hits[0].span == Span{0, 8});

    const std::vector<Lexicon> stem{{"no", {{"stem", MatchMode::word, ""}}}};
    CHECK(detect("bestemme", TextSource::transcript, stem).empty());
    CHECK(detect("Stem!", TextSource::transcript, stem).size() == 1);
    CHECK(detect("", TextSource::transcript, sample()).empty());
}

TEST_CASE("worked example texts carry no buzzwords") {
    CHECK(detect("Someone captured the | missile in the Beirut blast", TextSource::overlay, sample()).empty());
    CHECK(detect("إنه لأمر مخجل", TextSource::transcript, sample()).empty());
}

TEST_CASE("regex-lite and phrase matching") {
    auto hits = detect("Globalists and the GLOBALIST agenda; chemtrails!", TextSource::transcript, sample());
    CHECK(hits.size() == 3);
    CHECK(detect("antiglobalist", TextSource::transcript, sample()).empty());
    CHECK(detect("Stem-FRP", TextSource::transcript, sample()).empty());
    hits = detect("the DEEP\n state is real", TextSource::transcript, sample());
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].surface == "DEEP\n state");
    CHECK(hits[0].span == Span{4, 15});
}

TEST_CASE("spans are code point offsets into the original text") {
    const std::string text = "Før valget: STEM FRP, sa han. Øy, stem  frp!";
    const auto hits = detect(text, TextSource::transcript, sample());
    REQUIRE(hits.size() == 2);
    for (const auto& h : hits) CHECK(cp_substr(text, h.span.begin, h.span.end) == h.surface);
    CHECK(hits[0].span.begin == 12);
}

TEST_CASE("case and whitespace invariance over generated corpora") {
    testing::Gen gen(17);
    auto terms = plain_terms(MatchMode::word);
    const auto phrases = plain_terms(MatchMode::phrase);
    terms.insert(terms.end(), phrases.begin(), phrases.end());
    const Detector detector(sample());
    for (int i = 0; i < 1500; ++i) {
        std::vector<std::string> words;
        for (int k = gen.uniform_int(1, 12); k > 0; --k) {
            words.push_back(gen.coin(0.3) ? gen.pick(terms) : gen.pick(kFiller));
        }
        std::string single, spaced;
        for (std::size_t k = 0; k < words.size(); ++k) {
            const auto& w = words[k];
            if (k) {
                single += ' ';
                spaced += gen.pick(std::vector<std::string>{" ", "  ", "\t", " \t ", "   "});
            }
            single += w;
            std::string ws = w;
            std::replace(ws.begin(), ws.end(), ' ', '\t');
            spaced += gen.coin() ? w : ws;
        }
        const auto source = gen.coin() ? TextSource::transcript : TextSource::overlay;
        const auto base = term_multiset(detector.detect(single, source));
        CHECK(term_multiset(detector.detect(upper(single), source)) == base);
        CHECK(term_multiset(detector.detect(spaced, source)) == base);
    }
}

TEST_CASE("terms glued inside longer words never match") {
    testing::Gen gen(19);
    const auto words = plain_terms(MatchMode::word);
    const auto phrases = plain_terms(MatchMode::phrase);
    const Detector detector(sample());
    for (int i = 0; i < 1500; ++i) {
        const bool phrase = gen.coin();
        const auto& term = phrase ? gen.pick(phrases) : gen.pick(words);
        std::string glued = term;
        const int side = gen.uniform_int(0, 2);
        if (side != 1) glued = gen.pick(std::vector<std::string>{"x", "be", "anti", "ø"}) + glued;
        if (side != 0) glued += gen.pick(std::vector<std::string>{"x", "ene", "s2", "å"});
        const auto text = gen.pick(kFiller) + " " + glued + " " + gen.pick(kFiller);
        for (const auto& h : detector.detect(text, TextSource::transcript)) CHECK_MESSAGE(h.term != term, text);
    }
}

TEST_CASE("one hit per span and term") {
    testing::Gen gen(23);
    const Detector detector(sample());
    for (int i = 0; i < 500; ++i) {
        std::string text;
        for (int k = gen.uniform_int(1, 10); k > 0; --k) {
            text += gen.pick(std::vector<std::string>{"stem frp ", "stem ", "frp ", "globalist ", "globalists "});
        }
        std::map<std::string, std::vector<Span>> by_term;
        for (const auto& h : detector.detect(text, TextSource::overlay)) by_term[h.term].push_back(h.span);
        for (auto& [term, spans] : by_term) {
            std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.begin < b.begin; });
            for (std::size_t k = 1; k < spans.size(); ++k) CHECK(spans[k].begin >= spans[k - 1].end);
        }
    }
}

TEST_CASE("lexicon parsing and validation") {
    CHECK(sample().size() == 3);
    std::size_t entries = 0;
    for (const auto& l : sample()) entries += l.entries.size();
    CHECK(entries == 30);
    CHECK(validate(sample()).empty());

    CHECK_THROWS_WITH_AS(parse_lexicons("{\"language\":\"en\"}\n", "x.jsonl"), doctest::Contains("x.jsonl:1"), Error);
    CHECK_THROWS_WITH_AS(parse_lexicons("# c\n\n{oops\n", "y.jsonl"), doctest::Contains("BadLexicon"), Error);
    CHECK_THROWS_AS(parse_lexicons(R"({"language":"en","term":"x","match_mode":"fuzzy"})"), Error);

    const std::vector<Lexicon> dup{{"en", {{"Fake News", MatchMode::phrase, ""}, {"fake  news", MatchMode::phrase, ""}}},
                                   {"*", {{"**", MatchMode::regex_lite, ""}, {"", MatchMode::word, ""}}}};
    CHECK(validate(dup).size() == 3);
}

} // TEST_SUITE
