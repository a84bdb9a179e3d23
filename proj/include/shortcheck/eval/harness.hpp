#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shortcheck/core/config.hpp"
#include "shortcheck/core/types.hpp"
#include "shortcheck/eval/metrics.hpp"

namespace shortcheck::eval {

struct DatasetRecord {
    std::string video_id;
    Label gold_label = Label::Not_Checkworthy;
    std::string language;
    std::optional<ModalitySignals> signals; // fixture mode
    std::optional<std::string> media_path;  // live mode; resolved against the dataset directory

    bool operator==(const DatasetRecord&) const = default;
};

void to_json(Json& j, const DatasetRecord& value);
void from_json(const Json& j, DatasetRecord& value);

// One JSON record per line; '#' lines and blank lines are ignored.
std::vector<DatasetRecord> parse_dataset(std::string_view text, const std::filesystem::path& base_dir = {});
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path);

enum class EvalMode { fixture, live };

// Runs the full pipeline on a record's media and returns its result.
using LiveAnalyzer = std::function<CheckworthinessResult(const DatasetRecord&)>;

struct EvalOptions {
    EvalMode mode = EvalMode::fixture;
    LiveAnalyzer analyzer; // required in live mode
    int workers = 1;       // concurrent records in live mode
    std::string name;
};

/// Scores every record (decision engine on recorded signals in fixture mode,
/// the live analyzer otherwise) and folds the predictions into a report.
/// Records that cannot be evaluated are listed in `skipped`, never dropped.
EvalReport run_eval(const std::vector<DatasetRecord>& dataset, const PipelineConfig& config,
                    const EvalOptions& options = {});

struct MetricDelta {
    double precision = 0.0; // macro
    double recall = 0.0;    // macro
    double accuracy = 0.0;
    double f1 = 0.0;        // macro
    double weighted_f1 = 0.0;
    double cw_precision = 0.0;
    double cw_recall = 0.0;
    double cw_f1 = 0.0;

    bool operator==(const MetricDelta&) const = default;
};

MetricDelta delta(const EvalReport& ablated, const EvalReport& baseline);

struct AblationRow {
    std::string removed;
    EvalReport report;
    MetricDelta delta;
};

struct AblationTable {
    EvalReport baseline;
    std::vector<AblationRow> rows;
};

// Modules ablated when the caller names none.
const std::vector<std::string>& default_ablation_modules();

/// Re-scores a fixture dataset once per module with that module disabled.
/// Throws Error(UnknownModule) for names outside the module set.
AblationTable run_ablation(const std::vector<DatasetRecord>& dataset, const PipelineConfig& config,
                           const std::vector<std::string>& modules);

// Signed deltas ("+0.027", "-0.076", "0.000").
std::string render_text(const AblationTable& table);
std::string render_csv(const AblationTable& table);

struct DeepfakeSample {
    std::string id;
    bool is_fake = false;
    std::vector<std::string> frames; // encoded images
};

// Records: {"id": ..., "label": "fake"|"real", "frames": [paths relative to the file]}.
std::vector<DeepfakeSample> load_deepfake_dataset(const std::filesystem::path& path);

// Returns the video-level score, or nullopt when no face was found.
using DeepfakeScorer = std::function<std::optional<double>(const DeepfakeSample&)>;

struct DeepfakeBackend {
    std::string name;
    DeepfakeScorer scorer;
};

struct DeepfakeRow {
    std::string backend;
    std::optional<std::string> error;
    std::size_t n = 0;
    double accuracy = 0.0;
    double precision = 0.0; // fake class
    double recall = 0.0;
    double f1 = 0.0;
    double weighted_f1 = 0.0;
    Confusion confusion{}; // index 0 = fake, 1 = real
};

/// Scores each sample with each backend; a sample is predicted fake when its
/// score is present and >= trigger. A failing backend gets an error row and
/// the others are still reported.
std::vector<DeepfakeRow> compare_deepfake_backends(const std::vector<DeepfakeSample>& dataset,
                                                   const std::vector<DeepfakeBackend>& backends, double trigger);

std::string render_text(const std::vector<DeepfakeRow>& rows);
std::string render_csv(const std::vector<DeepfakeRow>& rows);

} // namespace shortcheck::eval
