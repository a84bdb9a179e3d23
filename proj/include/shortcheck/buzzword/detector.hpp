#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shortcheck/core/types.hpp"

namespace shortcheck::buzzword {

/// NFKC + Unicode case folding, then whitespace runs collapsed to one space
/// and trimmed. Diacritics are preserved. Idempotent.
std::string normalize(std::string_view text);

enum class MatchMode { word, phrase, regex_lite };

std::string_view to_string(MatchMode mode);

struct LexiconEntry {
    std::string term;
    MatchMode match_mode = MatchMode::word;
    std::string note;
};

struct Lexicon {
    std::string language; // BCP-47 tag or "*"
    std::vector<LexiconEntry> entries;
};

// Parses one JSON record per line. Blank lines and lines starting with '#'
// are skipped. Throws Error(BadLexicon) naming the offending line.
std::vector<Lexicon> parse_lexicons(std::string_view text, const std::string& origin = "<memory>");
std::vector<Lexicon> load_lexicons(const std::filesystem::path& path);

// Structural problems: empty terms, duplicate (language, term) pairs,
// regex-lite patterns that are nothing but wildcards.
std::vector<std::string> validate(const std::vector<Lexicon>& lexicons);

/// Matches lexicon terms against word tokens of `text`.
///
/// Text is split into words with Unicode word segmentation and each word is
/// normalized. A term matches when its normalized word sequence equals a run
/// of text words and the separators between them normalize identically.
/// In regex-lite mode '*' inside a word matches any run of characters.
/// Matches of one term never overlap; spans are code point offsets into the
/// original text.
class Detector {
public:
    explicit Detector(std::vector<Lexicon> lexicons);

    [[nodiscard]] std::vector<BuzzwordHit> detect(std::string_view text, TextSource source) const;

    [[nodiscard]] const std::vector<Lexicon>& lexicons() const { return lexicons_; }

private:
    struct CompiledTerm {
        std::string term;
        MatchMode mode;
        std::vector<std::string> words;
        std::vector<std::string> separators;
    };

    std::vector<Lexicon> lexicons_;
    std::vector<CompiledTerm> terms_;
};

// Convenience wrapper over Detector.
std::vector<BuzzwordHit> detect(std::string_view text, TextSource source, const std::vector<Lexicon>& lexicons);

} // namespace shortcheck::buzzword
