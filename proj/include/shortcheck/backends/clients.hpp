#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shortcheck/backends/http.hpp"
#include "shortcheck/core/types.hpp"
#include "shortcheck/ingest/media.hpp"

namespace shortcheck::backends {

struct Segment {
    double t0 = 0.0;
    double t1 = 0.0;
    std::string text;

    bool operator==(const Segment&) const = default;
};

struct Transcript {
    std::string text; // segment texts joined by single spaces
    std::string detected_lang;
    std::vector<Segment> segments;
};

// Throws BadAudio unless `path` is a RIFF/WAVE PCM16 mono 16 kHz file.
void check_wav(const std::filesystem::path& path);

Transcript transcribe(const BackendClient& client, const std::filesystem::path& audio,
                      const std::optional<std::string>& lang_hint);

struct Box {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    bool operator==(const Box&) const = default;
};

struct FrameText {
    int index = 0;
    std::string text;
    std::vector<Box> boxes;
};

struct OcrResult {
    std::string overlay_text;
    std::vector<FrameText> per_frame;
};

/// Frame-ordered overlay text: empty frame texts are skipped, runs of
/// identical consecutive texts collapse to one, and the rest join with " | ".
std::string join_overlay(const std::vector<FrameText>& per_frame);

OcrResult ocr_frames(const BackendClient& client, const std::vector<ingest::FrameSample>& frames);

// One caption per frame, in frame order; empty captions are kept.
std::vector<std::string> caption_frames(const BackendClient& client,
                                        const std::vector<ingest::FrameSample>& frames);

struct DecodingParams {
    double temperature = 0.0;
    std::vector<std::string> stop;
    int max_tokens = 512;
};

/// Text with {name} placeholders. render() requires the supplied values to
/// cover every placeholder and rejects values for names the template lacks.
class PromptTemplate {
public:
    PromptTemplate(std::string name, std::string text, DecodingParams params = {});

    [[nodiscard]] std::string render(const std::map<std::string, std::string>& values) const;
    [[nodiscard]] const std::vector<std::string>& placeholders() const { return placeholders_; }
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::string& text() const { return text_; }
    [[nodiscard]] const DecodingParams& params() const { return params_; }

private:
    std::string name_;
    std::string text_;
    DecodingParams params_;
    std::vector<std::string> placeholders_;
};

// The combined summarize-and-classify prompt used by the pipeline.
const PromptTemplate& classification_prompt();

struct Classification {
    std::string video_summary;
    SemanticClass transcript_verdict = SemanticClass::unknown;
    SemanticClass summary_verdict = SemanticClass::unknown;
    SemanticClass overlay_verdict = SemanticClass::unknown;
    bool is_advertisement = false;
};

/// Reads the model reply line by line: "summary:", "transcript_verdict:",
/// "summary_verdict:", "overlay_verdict:" and "advertisement:". Missing or
/// unparseable verdict lines become `unknown`; the ad flag is true only for
/// an explicit yes/true.
Classification parse_classification(const std::string& reply);

/// Throws EmptyInput when captions, transcript and overlay text are all empty.
Classification summarize_and_classify(const BackendClient& client, const std::vector<std::string>& captions,
                                      const std::string& transcript, const std::string& overlay_text,
                                      const PromptTemplate& prompt = classification_prompt());

struct FrameScore {
    int index = 0;
    bool face = false;
    double score = 0.0;
};

struct DeepfakeResult {
    std::optional<double> score; // mean over face-bearing frames; absent without faces
    std::vector<FrameScore> per_frame;
};

DeepfakeResult deepfake_score(const BackendClient& client, const std::vector<ingest::FrameSample>& frames);
// Same request, frames given as already-encoded images (benchmark datasets).
DeepfakeResult deepfake_score_images(const BackendClient& client, const std::vector<std::string>& images);

} // namespace shortcheck::backends
