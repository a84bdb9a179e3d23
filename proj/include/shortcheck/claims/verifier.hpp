#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shortcheck/backends/http.hpp"
#include "shortcheck/core/types.hpp"

namespace shortcheck::claims {

// Sentences by Unicode sentence segmentation, trimmed, empties dropped.
std::vector<std::string> split_sentences(std::string_view text);

/// Sends the sentences of `text` to the claim-detection backend and keeps the
/// ones it labels check-worthy, in text order. EmptyInput for blank text.
std::vector<std::string> detect_claims(const backends::BackendClient& client, std::string_view text);

/// Maps a fact-check service label onto the four-way stance set. Returns
/// nullopt for labels outside the table (see docs/api.md).
std::optional<Stance> normalize_stance(std::string_view label);

/// One result per claim, in input order. Requests run concurrently, at most
/// four at a time.
/// A claim whose request fails becomes no_evidence with a warning; the batch
/// only fails (BackendUnavailable) when every claim failed. Labels outside the
/// table become disputed when evidence came back and no_evidence otherwise,
/// and a supported/refuted/disputed answer without evidence is downgraded to
/// no_evidence with a warning.
std::vector<ClaimCheckResult> verify_claims(const backends::BackendClient& client,
                                            const std::vector<std::string>& claims);

} // namespace shortcheck::claims
