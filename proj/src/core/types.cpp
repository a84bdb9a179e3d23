#include "shortcheck/core/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

namespace shortcheck {

namespace {

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view strip(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    return text;
}

} // namespace

std::string_view to_string(SemanticClass value) {
    switch (value) {
    case SemanticClass::political: return "political";
    case SemanticClass::hostile: return "hostile";
    case SemanticClass::benign: return "benign";
    case SemanticClass::promotional: return "promotional";
    case SemanticClass::contentious_issue: return "contentious_issue";
    case SemanticClass::unknown: return "unknown";
    }
    return "unknown";
}

SemanticClass parse_semantic_class(std::string_view text) {
    static const std::array<std::pair<std::string_view, SemanticClass>, 7> kTokens{{
        {"political", SemanticClass::political},
        {"hostile", SemanticClass::hostile},
        {"benign", SemanticClass::benign},
        {"promotional", SemanticClass::promotional},
        {"contentious_issue", SemanticClass::contentious_issue},
        {"contentious-issue", SemanticClass::contentious_issue},
        {"contentious issue", SemanticClass::contentious_issue},
    }};
    const std::string lowered = ascii_lower(strip(text));
    std::size_t best_pos = std::string::npos;
    SemanticClass best = SemanticClass::unknown;
    for (const auto& [token, cls] : kTokens) {
        const auto pos = lowered.find(token);
        if (pos < best_pos) {
            best_pos = pos;
            best = cls;
        }
    }
    return best;
}

std::string_view to_string(Label value) {
    return value == Label::Checkworthy ? "Checkworthy" : "Not_Checkworthy";
}

std::optional<Label> parse_label(std::string_view text) {
    if (text == "Checkworthy") return Label::Checkworthy;
    if (text == "Not_Checkworthy") return Label::Not_Checkworthy;
    return std::nullopt;
}

std::string_view to_string(Stance value) {
    switch (value) {
    case Stance::supported: return "supported";
    case Stance::refuted: return "refuted";
    case Stance::disputed: return "disputed";
    case Stance::no_evidence: return "no_evidence";
    }
    return "no_evidence";
}

std::optional<Stance> parse_stance(std::string_view text) {
    if (text == "supported") return Stance::supported;
    if (text == "refuted") return Stance::refuted;
    if (text == "disputed") return Stance::disputed;
    if (text == "no_evidence") return Stance::no_evidence;
    return std::nullopt;
}

std::string_view to_string(TextSource value) {
    return value == TextSource::transcript ? "transcript" : "overlay";
}

std::optional<TextSource> parse_text_source(std::string_view text) {
    if (text == "transcript") return TextSource::transcript;
    if (text == "overlay") return TextSource::overlay;
    return std::nullopt;
}

bool is_consistent(const CheckworthinessResult& result) {
    double sum = 0.0;
    for (const auto& c : result.contributions) {
        sum += c.weight;
    }
    if (sum != result.score || result.score < 0.0) {
        return false;
    }
    if (result.ad_override) {
        return result.label == Label::Not_Checkworthy;
    }
    return (result.label == Label::Checkworthy) == (result.score >= result.threshold);
}

std::vector<std::string> check_invariants(const ClaimCheckResult& claim) {
    std::vector<std::string> out;
    if (claim.claim_text.empty()) out.emplace_back("claim_text must be non-empty");
    if (!(claim.confidence >= 0.0 && claim.confidence <= 1.0)) {
        out.emplace_back("confidence must be in [0,1]");
    }
    if (claim.evidence_refs.empty() && claim.stance != Stance::no_evidence) {
        out.emplace_back("evidence_refs may be empty only for no_evidence");
    }
    return out;
}

std::vector<std::string> check_invariants(const ModalitySignals& signals) {
    std::vector<std::string> out;
    if (signals.deepfake_score && !(*signals.deepfake_score >= 0.0 && *signals.deepfake_score <= 1.0)) {
        out.emplace_back("deepfake_score must be in [0,1]");
    }
    for (const auto& claim : signals.claim_results) {
        for (auto& v : check_invariants(claim)) out.push_back("claim_results: " + v);
    }
    return out;
}

} // namespace shortcheck
