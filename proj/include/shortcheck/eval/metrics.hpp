#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shortcheck/core/serialize.hpp"
#include "shortcheck/core/types.hpp"

namespace shortcheck::eval {

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0; // gold count

    bool operator==(const ClassMetrics&) const = default;
};

// Precision/recall/F1 from raw counts; every 0/0 is taken as 0.
ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn);

struct Prediction {
    std::string video_id;
    Label gold = Label::Not_Checkworthy;
    Label pred = Label::Not_Checkworthy;
    std::optional<double> score;

    bool operator==(const Prediction&) const = default;
};

struct SkippedRecord {
    std::string video_id;
    std::string reason;

    bool operator==(const SkippedRecord&) const = default;
};

// confusion[gold][pred], index 0 = Checkworthy, 1 = Not_Checkworthy.
using Confusion = std::array<std::array<std::size_t, 2>, 2>;

inline constexpr std::size_t index_of(Label l) { return l == Label::Checkworthy ? 0 : 1; }

struct EvalReport {
    std::string name;
    std::size_t n = 0;
    ClassMetrics checkworthy;
    ClassMetrics not_checkworthy;
    ClassMetrics macro; // unweighted mean of the two classes; support = n
    double weighted_f1 = 0.0;
    double accuracy = 0.0;
    Confusion confusion{};
    std::vector<Prediction> predictions;
    std::vector<SkippedRecord> skipped;

    bool operator==(const EvalReport&) const = default;
};

/// Per-class, macro and support-weighted metrics plus the confusion matrix.
/// Throws Error(LengthMismatch) or Error(Empty).
EvalReport compute_metrics(std::span<const Label> golds, std::span<const Label> preds);

// Same, taking gold/pred from the prediction rows and keeping them in the report.
EvalReport compute_metrics(std::vector<Prediction> predictions);

std::string render_text(const EvalReport& report);
std::string render_csv(const EvalReport& report);

void to_json(Json& j, const ClassMetrics& value);
void from_json(const Json& j, ClassMetrics& value);
void to_json(Json& j, const Prediction& value);
void from_json(const Json& j, Prediction& value);
void to_json(Json& j, const SkippedRecord& value);
void from_json(const Json& j, SkippedRecord& value);
void to_json(Json& j, const EvalReport& value);
void from_json(const Json& j, EvalReport& value);

} // namespace shortcheck::eval
