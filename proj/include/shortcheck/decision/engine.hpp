#pragma once

#include <string>
#include <string_view>

#include "shortcheck/core/config.hpp"
#include "shortcheck/core/types.hpp"

namespace shortcheck::decision {

/// Aggregates modality signals into a label.
///
/// Firing rules, each contributing its configured weight:
///   verdict.<modality>  verdict is political, hostile or contentious_issue
///   buzzword            at least one buzzword hit
///   claim.refuted       some claim stance is refuted or disputed
///   claim.present       claims exist but none is refuted or disputed
///   deepfake            deepfake_score >= deepfake_trigger
///   weapon              weapon_detected is true
/// Signals of disabled modules are listed with weight 0 and rationale
/// "disabled". An advertisement forces Not_Checkworthy when ad_filter is on;
/// the score is still reported.
CheckworthinessResult score(const ModalitySignals& signals, const PipelineConfig& config);

// Deterministic, line-oriented report of a result.
std::string explain(const CheckworthinessResult& result);

/// Returns `signals` with everything derived from `module` cleared. Scoring
/// the result equals scoring the original with `module` disabled.
ModalitySignals without_module(ModalitySignals signals, std::string_view module);

} // namespace shortcheck::decision
