#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shortcheck {

// Videos longer than this are rejected at ingest.
inline constexpr double kMaxDurationSeconds = 600.0;

enum class SemanticClass {
    political,
    hostile,
    benign,
    promotional,
    contentious_issue,
    unknown,
};

std::string_view to_string(SemanticClass value);

/// Total verdict parser for model output: lowercases, strips and returns the
/// class whose token occurs earliest in the text. Accepts "contentious-issue"
/// and "contentious issue" as spellings of contentious_issue. Anything without
/// a class token maps to `unknown`.
SemanticClass parse_semantic_class(std::string_view text);

enum class Label { Checkworthy, Not_Checkworthy };

std::string_view to_string(Label value);
std::optional<Label> parse_label(std::string_view text);

enum class Stance { supported, refuted, disputed, no_evidence };

std::string_view to_string(Stance value);
std::optional<Stance> parse_stance(std::string_view text);

enum class TextSource { transcript, overlay };

std::string_view to_string(TextSource value);
std::optional<TextSource> parse_text_source(std::string_view text);

struct VideoItem {
    std::string id; // sha256 hex of media bytes
    std::string source;
    std::optional<std::string> language_hint;
    double duration_s = 0.0;
    std::optional<std::string> title;
    std::optional<std::string> description;

    bool operator==(const VideoItem&) const = default;
};

// Half-open range of Unicode code point offsets into the source text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const Span&) const = default;
};

struct BuzzwordHit {
    std::string term;
    std::string surface;
    TextSource source = TextSource::transcript;
    Span span;

    bool operator==(const BuzzwordHit&) const = default;
};

struct ClaimCheckResult {
    std::string claim_text;
    Stance stance = Stance::no_evidence;
    std::vector<std::string> evidence_refs;
    double confidence = 0.0;
    // Set when the backend call for this claim failed or its answer was degraded.
    std::optional<std::string> warning;

    bool operator==(const ClaimCheckResult&) const = default;
};

struct ModalitySignals {
    std::optional<std::string> transcript;
    std::optional<std::string> transcript_lang;
    std::optional<std::string> overlay_text;
    std::optional<std::string> video_summary;
    SemanticClass transcript_verdict = SemanticClass::unknown;
    SemanticClass summary_verdict = SemanticClass::unknown;
    SemanticClass overlay_verdict = SemanticClass::unknown;
    std::vector<BuzzwordHit> buzzword_hits;
    std::optional<double> deepfake_score;
    std::vector<ClaimCheckResult> claim_results;
    bool is_advertisement = false;
    // Weapon detection was dropped from the pipeline; the field only exists so
    // recorded datasets can still carry it for ablation runs.
    std::optional<bool> weapon_detected;

    [[nodiscard]] bool buzzword_detected() const { return !buzzword_hits.empty(); }

    bool operator==(const ModalitySignals&) const = default;
};

struct Contribution {
    std::string signal;
    double weight = 0.0;
    std::string rationale;

    bool operator==(const Contribution&) const = default;
};

inline constexpr std::string_view kDisabledRationale = "disabled";

struct CheckworthinessResult {
    Label label = Label::Not_Checkworthy;
    double score = 0.0;
    double threshold = 0.0;
    std::vector<Contribution> contributions;
    bool ad_override = false;

    bool operator==(const CheckworthinessResult&) const = default;
};

/// Checks the result's internal invariants: score is the exact left fold of
/// the contribution weights, an ad override forces Not_Checkworthy, and
/// otherwise the label follows score >= threshold.
bool is_consistent(const CheckworthinessResult& result);

// Returns violated invariants as human-readable strings; empty when valid.
std::vector<std::string> check_invariants(const ModalitySignals& signals);
std::vector<std::string> check_invariants(const ClaimCheckResult& claim);

} // namespace shortcheck
