#include "shortcheck/claims/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <memory>
#include <optional>

#include <unicode/brkiter.h>
#include <unicode/unistr.h>

#include "shortcheck/core/error.hpp"
#include "shortcheck/core/serialize.hpp"

namespace shortcheck::claims {

namespace {

std::string trim(std::string_view s) {
    const auto ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c == '_' || c == '-') c = ' ';
    }
    return out;
}

ClaimCheckResult degraded(const std::string& claim, std::string warning) {
    ClaimCheckResult r;
    r.claim_text = claim;
    r.stance = Stance::no_evidence;
    r.confidence = 0.0;
    r.warning = std::move(warning);
    return r;
}

ClaimCheckResult verify_one(const backends::BackendClient& client, const std::string& claim) {
    const Json reply = client.call(backends::ops::kFactcheck, Json{{"claim", claim}});
    ClaimCheckResult r;
    r.claim_text = claim;
    std::string label;
    try {
        label = reply.at("label").get<std::string>();
        r.confidence = reply.value("confidence", 0.0);
        for (const auto& e : reply.value("evidence", Json::array())) {
            r.evidence_refs.push_back(e.is_string() ? e.get<std::string>() : e.at("url").get<std::string>());
        }
    } catch (const Json::exception& e) {
        return degraded(claim, std::string("malformed fact-check response: ") + e.what());
    }
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
        return degraded(claim, "confidence outside [0,1]");
    }
    if (auto stance = normalize_stance(label)) {
        r.stance = *stance;
    } else {
        r.stance = r.evidence_refs.empty() ? Stance::no_evidence : Stance::disputed;
        r.warning = "unrecognized fact-check label '" + label + "'";
    }
    if (r.stance != Stance::no_evidence && r.evidence_refs.empty()) {
        r.warning = "stance '" + std::string(to_string(r.stance)) + "' returned without evidence";
        r.stance = Stance::no_evidence;
    }
    return r;
}

constexpr std::size_t kMaxInFlight = 4;

} // namespace

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    UErrorCode status = U_ZERO_ERROR;
    const icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createSentenceInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) throw Error(ErrorCode::Io, "ICU sentence iterator unavailable");
    it->setText(u);
    int32_t start = it->first();
    for (int32_t end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
        std::string piece;
        u.tempSubStringBetween(start, end).toUTF8String(piece);
        piece = trim(piece);
        if (!piece.empty()) out.push_back(std::move(piece));
    }
    return out;
}

std::vector<std::string> detect_claims(const backends::BackendClient& client, std::string_view text) {
    if (trim(text).empty()) throw Error(ErrorCode::EmptyInput, "detect_claims needs non-empty text");
    const auto sentences = split_sentences(text);
    const Json reply = client.call(backends::ops::kDetectClaims, Json{{"sentences", sentences}});
    std::vector<bool> labels;
    try {
        labels = reply.at("labels").get<std::vector<bool>>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::BackendUnavailable, std::string("claim detection: malformed response: ") + e.what());
    }
    if (labels.size() != sentences.size()) {
        throw Error(ErrorCode::BackendUnavailable, "claim detection: got " + std::to_string(labels.size()) +
                                                       " labels for " + std::to_string(sentences.size()) +
                                                       " sentences");
    }
    std::vector<std::string> claims;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (labels[i]) claims.push_back(sentences[i]);
    }
    return claims;
}

std::optional<Stance> normalize_stance(std::string_view label) {
    static const std::pair<std::string_view, Stance> kTable[] = {
        {"supported", Stance::supported},
        {"supports", Stance::supported},
        {"support", Stance::supported},
        {"true", Stance::supported},
        {"mostly true", Stance::supported},
        {"correct", Stance::supported},
        {"entailment", Stance::supported},
        {"refuted", Stance::refuted},
        {"refutes", Stance::refuted},
        {"false", Stance::refuted},
        {"mostly false", Stance::refuted},
        {"incorrect", Stance::refuted},
        {"pants on fire", Stance::refuted},
        {"contradiction", Stance::refuted},
        {"disputed", Stance::disputed},
        {"mixed", Stance::disputed},
        {"misleading", Stance::disputed},
        {"half true", Stance::disputed},
        {"partly false", Stance::disputed},
        {"no evidence", Stance::no_evidence},
        {"not enough info", Stance::no_evidence},
        {"nei", Stance::no_evidence},
        {"unverified", Stance::no_evidence},
        {"neutral", Stance::no_evidence},
    };
    const std::string key = lower_ascii(trim(label));
    for (const auto& [name, stance] : kTable) {
        if (key == name) return stance;
    }
    return std::nullopt;
}

std::vector<ClaimCheckResult> verify_claims(const backends::BackendClient& client,
                                            const std::vector<std::string>& claims) {
    if (claims.empty()) return {};
    // At most kMaxInFlight requests are open at once; workers pull the next
    // claim index so results still land in input order.
    std::vector<std::optional<ClaimCheckResult>> slots(claims.size());
    std::vector<std::string> errors(claims.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < claims.size(); i = next++) {
            try {
                slots[i] = verify_one(client, claims[i]);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::future<void>> pool;
    const std::size_t width = std::min(claims.size(), kMaxInFlight);
    for (std::size_t w = 0; w < width; ++w) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();

    std::vector<ClaimCheckResult> results;
    results.reserve(claims.size());
    std::size_t failures = 0;
    std::string last_error;
    for (std::size_t i = 0; i < claims.size(); ++i) {
        if (slots[i]) {
            results.push_back(std::move(*slots[i]));
        } else {
            ++failures;
            last_error = errors[i];
            results.push_back(degraded(claims[i], "fact-check request failed: " + errors[i]));
        }
    }
    if (failures == claims.size()) {
        throw Error(ErrorCode::BackendUnavailable, "every fact-check request failed; last: " + last_error);
    }
    return results;
}

} // namespace shortcheck::claims
