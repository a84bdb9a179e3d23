#include "shortcheck/buzzword/detector.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <tuple>

#include <unicode/brkiter.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"
#include "shortcheck/core/serialize.hpp"

namespace shortcheck::buzzword {

namespace {

const icu::Normalizer2& nfkc_casefold() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
    if (U_FAILURE(status) || n == nullptr) throw std::runtime_error("ICU NFKC_Casefold unavailable");
    return *n;
}

// NFKC_Casefold with whitespace runs collapsed to a single space; no trimming.
icu::UnicodeString fold(const icu::UnicodeString& in) {
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString folded = nfkc_casefold().normalize(in, status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
    icu::UnicodeString out;
    bool in_space = false;
    for (int32_t i = 0; i < folded.length();) {
        const UChar32 c = folded.char32At(i);
        if (u_isUWhiteSpace(c)) {
            if (!in_space) out.append(static_cast<UChar>(' '));
            in_space = true;
        } else {
            out.append(c);
            in_space = false;
        }
        i += U16_LENGTH(c);
    }
    return out;
}

std::string to_utf8(const icu::UnicodeString& s) {
    std::string out;
    s.toUTF8String(out);
    return out;
}

struct Token {
    int32_t begin = 0; // UTF-16 offsets into the source string
    int32_t end = 0;
    std::string norm;
};

struct Tokenized {
    std::vector<Token> tokens;
    std::vector<std::string> separators; // separators[i] sits between tokens i and i+1
};

Tokenized tokenize(const icu::UnicodeString& text) {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) throw std::runtime_error("ICU word break iterator unavailable");
    it->setText(text);
    Tokenized out;
    int32_t start = it->first();
    for (int32_t end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
        if (it->getRuleStatus() == UBRK_WORD_NONE) continue;
        icu::UnicodeString piece(text, start, end - start);
        out.tokens.push_back(Token{start, end, to_utf8(fold(piece))});
    }
    for (std::size_t i = 0; i + 1 < out.tokens.size(); ++i) {
        const int32_t gap_begin = out.tokens[i].end;
        const int32_t gap_end = out.tokens[i + 1].begin;
        out.separators.push_back(to_utf8(fold(icu::UnicodeString(text, gap_begin, gap_end - gap_begin))));
    }
    return out;
}

bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] != '*' && pattern[p] == text[t]) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::vector<std::string> split_spaces(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto next = s.find(' ', pos);
        const auto piece = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (!piece.empty()) out.push_back(piece);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

std::optional<MatchMode> parse_mode(std::string_view s) {
    if (s == "word") return MatchMode::word;
    if (s == "phrase") return MatchMode::phrase;
    if (s == "regex-lite" || s == "regex_lite") return MatchMode::regex_lite;
    return std::nullopt;
}

} // namespace

std::string normalize(std::string_view text) {
    const auto folded = to_utf8(fold(icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())))));
    const auto first = folded.find_first_not_of(' ');
    if (first == std::string::npos) return {};
    const auto last = folded.find_last_not_of(' ');
    return folded.substr(first, last - first + 1);
}

std::string_view to_string(MatchMode mode) {
    switch (mode) {
    case MatchMode::word: return "word";
    case MatchMode::phrase: return "phrase";
    case MatchMode::regex_lite: return "regex-lite";
    }
    return "word";
}

std::vector<Lexicon> parse_lexicons(std::string_view text, const std::string& origin) {
    std::vector<Lexicon> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;

        const std::string where = origin + ":" + std::to_string(line_no);
        Json rec;
        try {
            rec = Json::parse(line);
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::BadLexicon, where + ": " + e.what());
        }
        if (!rec.is_object() || !rec.contains("term") || !rec["term"].is_string()) {
            throw Error(ErrorCode::BadLexicon, where + ": record needs a string \"term\"");
        }
        LexiconEntry entry;
        entry.term = rec["term"].get<std::string>();
        auto mode = parse_mode(rec.value("match_mode", std::string("word")));
        if (!mode) throw Error(ErrorCode::BadLexicon, where + ": unknown match_mode");
        entry.match_mode = *mode;
        entry.note = rec.value("note", std::string());
        const std::string language = rec.value("language", std::string("*"));

        auto it = std::find_if(out.begin(), out.end(), [&](const Lexicon& l) { return l.language == language; });
        if (it == out.end()) {
            out.push_back(Lexicon{language, {}});
            it = std::prev(out.end());
        }
        it->entries.push_back(std::move(entry));
    }
    if (auto problems = validate(out); !problems.empty()) {
        throw Error(ErrorCode::BadLexicon, origin + ": " + problems.front());
    }
    return out;
}

std::vector<Lexicon> load_lexicons(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::BadLexicon, e.what());
    }
    return parse_lexicons(text, path.string());
}

std::vector<std::string> validate(const std::vector<Lexicon>& lexicons) {
    std::vector<std::string> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& lex : lexicons) {
        if (lex.language.empty()) out.emplace_back("lexicon language must be non-empty");
        for (const auto& e : lex.entries) {
            const auto norm = normalize(e.term);
            if (norm.empty()) {
                out.push_back("empty term in language " + lex.language);
                continue;
            }
            if (!seen.emplace(lex.language, norm).second) {
                out.push_back("duplicate term \"" + e.term + "\" in language " + lex.language);
            }
            if (e.match_mode == MatchMode::regex_lite) {
                for (const auto& w : split_spaces(norm)) {
                    if (w.find_first_not_of('*') == std::string::npos) {
                        out.push_back("regex-lite term \"" + e.term + "\" has a wildcard-only word");
                    }
                }
            } else if (tokenize(icu::UnicodeString::fromUTF8(norm)).tokens.empty()) {
                out.push_back("term \"" + e.term + "\" has no word characters");
            }
        }
    }
    return out;
}

Detector::Detector(std::vector<Lexicon> lexicons) : lexicons_(std::move(lexicons)) {
    if (auto problems = validate(lexicons_); !problems.empty()) {
        throw Error(ErrorCode::BadLexicon, problems.front());
    }
    std::set<std::tuple<int, std::vector<std::string>, std::vector<std::string>>> dedup;
    for (const auto& lex : lexicons_) {
        for (const auto& e : lex.entries) {
            CompiledTerm ct{e.term, e.match_mode, {}, {}};
            const auto norm = normalize(e.term);
            if (e.match_mode == MatchMode::regex_lite) {
                ct.words = split_spaces(norm);
                ct.separators.assign(ct.words.empty() ? 0 : ct.words.size() - 1, " ");
            } else {
                auto tok = tokenize(icu::UnicodeString::fromUTF8(norm));
                for (auto& t : tok.tokens) ct.words.push_back(std::move(t.norm));
                ct.separators = std::move(tok.separators);
            }
            // The same term listed under several languages matches once.
            if (dedup.emplace(static_cast<int>(ct.mode), ct.words, ct.separators).second) terms_.push_back(std::move(ct));
        }
    }
}

std::vector<BuzzwordHit> Detector::detect(std::string_view text, TextSource source) const {
    std::vector<BuzzwordHit> hits;
    if (text.empty() || terms_.empty()) return hits;

    const auto u16 = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    const auto tok = tokenize(u16);

    // UTF-16 offset -> code point offset.
    std::vector<std::size_t> cp_index(static_cast<std::size_t>(u16.length()) + 1, 0);
    std::size_t cp = 0;
    for (int32_t i = 0; i < u16.length();) {
        const int32_t len = U16_LENGTH(u16.char32At(i));
        for (int32_t k = 0; k < len && i + k <= u16.length(); ++k) cp_index[static_cast<std::size_t>(i + k)] = cp;
        i += len;
        ++cp;
    }
    cp_index.back() = cp;

    const auto& tokens = tok.tokens;
    for (const auto& term : terms_) {
        const std::size_t n = term.words.size();
        if (n == 0 || n > tokens.size()) continue;
        for (std::size_t i = 0; i + n <= tokens.size();) {
            bool ok = true;
            for (std::size_t k = 0; k < n && ok; ++k) {
                const auto& word = tokens[i + k].norm;
                ok = term.mode == MatchMode::regex_lite ? glob_match(term.words[k], word) : word == term.words[k];
                if (ok && k + 1 < n) ok = tok.separators[i + k] == term.separators[k];
            }
            if (!ok) {
                ++i;
                continue;
            }
            const int32_t b = tokens[i].begin;
            const int32_t e = tokens[i + n - 1].end;
            BuzzwordHit hit;
            hit.term = term.term;
            hit.source = source;
            hit.span = Span{cp_index[static_cast<std::size_t>(b)], cp_index[static_cast<std::size_t>(e)]};
            hit.surface = to_utf8(icu::UnicodeString(u16, b, e - b));
            hits.push_back(std::move(hit));
            i += n;
        }
    }
    std::sort(hits.begin(), hits.end(), [](const BuzzwordHit& a, const BuzzwordHit& b) {
        return std::tie(a.span.begin, a.span.end, a.term) < std::tie(b.span.begin, b.span.end, b.term);
    });
    return hits;
}

std::vector<BuzzwordHit> detect(std::string_view text, TextSource source, const std::vector<Lexicon>& lexicons) {
    return Detector(lexicons).detect(text, source);
}

} // namespace shortcheck::buzzword
