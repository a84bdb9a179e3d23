#include "shortcheck/decision/engine.hpp"

#include <sstream>

namespace shortcheck::decision {

namespace {

bool verdict_fires(SemanticClass c) {
    return c == SemanticClass::political || c == SemanticClass::hostile || c == SemanticClass::contentious_issue;
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

class Ledger {
public:
    explicit Ledger(const PipelineConfig& config) : config_(config) {}

    void disabled(std::string_view signal) {
        result_.contributions.push_back(Contribution{std::string(signal), 0.0, std::string(kDisabledRationale)});
    }

    void fire(std::string_view signal, std::string rationale) {
        const double w = config_.weight(signal);
        result_.contributions.push_back(Contribution{std::string(signal), w, std::move(rationale)});
    }

    CheckworthinessResult finish(bool ad_override) {
        double sum = 0.0;
        for (const auto& c : result_.contributions) sum += c.weight;
        result_.score = sum;
        result_.threshold = config_.threshold;
        result_.ad_override = ad_override;
        result_.label = (!ad_override && sum >= config_.threshold) ? Label::Checkworthy : Label::Not_Checkworthy;
        return std::move(result_);
    }

private:
    const PipelineConfig& config_;
    CheckworthinessResult result_;
};

void score_verdict(Ledger& ledger, const PipelineConfig& config, std::string_view module, std::string_view signal,
                   std::string_view modality, SemanticClass verdict) {
    if (!config.enabled(module)) {
        ledger.disabled(signal);
    } else if (verdict_fires(verdict)) {
        ledger.fire(signal, std::string(modality) + " verdict is " + std::string(to_string(verdict)));
    }
}

} // namespace

CheckworthinessResult score(const ModalitySignals& s, const PipelineConfig& config) {
    Ledger ledger(config);

    score_verdict(ledger, config, modules::kTranscript, signals::kVerdictTranscript, "transcript", s.transcript_verdict);
    score_verdict(ledger, config, modules::kSummary, signals::kVerdictSummary, "summary", s.summary_verdict);
    score_verdict(ledger, config, modules::kOcr, signals::kVerdictOverlay, "overlay", s.overlay_verdict);

    if (!config.enabled(modules::kBuzzword)) {
        ledger.disabled(signals::kBuzzword);
    } else if (!s.buzzword_hits.empty()) {
        std::string terms;
        for (const auto& h : s.buzzword_hits) {
            if (terms.find("\"" + h.term + "\"") != std::string::npos) continue;
            terms += terms.empty() ? "" : ", ";
            terms += "\"" + h.term + "\"";
        }
        ledger.fire(signals::kBuzzword, std::to_string(s.buzzword_hits.size()) + " buzzword hit(s): " + terms);
    }

    if (!config.enabled(modules::kFactCheck)) {
        ledger.disabled(signals::kClaimRefuted);
        ledger.disabled(signals::kClaimPresent);
    } else if (!s.claim_results.empty()) {
        std::size_t contested = 0;
        for (const auto& c : s.claim_results) {
            if (c.stance == Stance::refuted || c.stance == Stance::disputed) ++contested;
        }
        if (contested > 0) {
            ledger.fire(signals::kClaimRefuted, std::to_string(contested) + " of " +
                                                    std::to_string(s.claim_results.size()) +
                                                    " claim(s) refuted or disputed");
        } else {
            ledger.fire(signals::kClaimPresent,
                        std::to_string(s.claim_results.size()) + " claim(s) detected, none refuted");
        }
    }

    if (!config.enabled(modules::kDeepfake)) {
        ledger.disabled(signals::kDeepfake);
    } else if (s.deepfake_score && *s.deepfake_score >= config.deepfake_trigger) {
        ledger.fire(signals::kDeepfake, "deepfake score " + format_number(*s.deepfake_score) + " >= trigger " +
                                            format_number(config.deepfake_trigger));
    }

    if (!config.enabled(modules::kWeapon)) {
        ledger.disabled(signals::kWeapon);
    } else if (s.weapon_detected.value_or(false)) {
        ledger.fire(signals::kWeapon, "weapon detected");
    }

    const bool ad_filter = config.enabled(modules::kAdFilter);
    if (!ad_filter) ledger.disabled(modules::kAdFilter);
    return ledger.finish(ad_filter && s.is_advertisement);
}

std::string explain(const CheckworthinessResult& result) {
    std::ostringstream os;
    if (result.ad_override) {
        os << "ADVERTISEMENT OVERRIDE: label forced to Not_Checkworthy regardless of score\n";
    }
    os << "label: " << to_string(result.label) << "\n";
    os << "score: " << format_number(result.score) << " (threshold " << format_number(result.threshold) << ", "
       << (result.score >= result.threshold ? "met" : "not met") << ")\n";

    std::string disabled;
    bool any = false;
    os << "contributions:\n";
    for (const auto& c : result.contributions) {
        if (c.rationale == kDisabledRationale && c.weight == 0.0) {
            disabled += disabled.empty() ? "" : ", ";
            disabled += c.signal;
            continue;
        }
        any = true;
        os << "  " << c.signal << " +" << format_number(c.weight) << "  " << c.rationale << "\n";
    }
    if (!any) os << "  no signals fired\n";
    os << "disabled: " << (disabled.empty() ? "none" : disabled) << "\n";
    return os.str();
}

ModalitySignals without_module(ModalitySignals s, std::string_view module) {
    if (module == modules::kTranscript) {
        s.transcript_verdict = SemanticClass::unknown;
    } else if (module == modules::kSummary) {
        s.summary_verdict = SemanticClass::unknown;
    } else if (module == modules::kOcr) {
        s.overlay_verdict = SemanticClass::unknown;
    } else if (module == modules::kBuzzword) {
        s.buzzword_hits.clear();
    } else if (module == modules::kFactCheck) {
        s.claim_results.clear();
    } else if (module == modules::kDeepfake) {
        s.deepfake_score.reset();
    } else if (module == modules::kWeapon) {
        s.weapon_detected.reset();
    } else if (module == modules::kAdFilter) {
        s.is_advertisement = false;
    }
    return s;
}

} // namespace shortcheck::decision
