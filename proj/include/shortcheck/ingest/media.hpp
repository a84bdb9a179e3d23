#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shortcheck/core/config.hpp"
#include "shortcheck/core/types.hpp"

namespace shortcheck::ingest {

struct FrameSample {
    int index = 0;
    double timestamp_s = 0.0;
    std::string image_bytes; // PNG
    int width = 0;
    int height = 0;

    bool operator==(const FrameSample&) const = default;
};

/// Frame timestamps k / rate_hz inside [0, duration_s). When that yields more
/// than max_frames points the schedule is re-spaced to exactly max_frames
/// points (duration_s - 1/rate_hz) * k / (max_frames - 1), starting at 0.
/// Always returns at least one timestamp.
std::vector<double> sample_frames(double duration_s, double rate_hz, int max_frames);

// Scratch directory removed (recursively) on destruction.
class Workspace {
public:
    explicit Workspace(const std::filesystem::path& root);
    ~Workspace();
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct MediaBundle {
    VideoItem video;
    std::optional<std::filesystem::path> audio_path; // mono 16 kHz PCM16 WAV
    std::vector<FrameSample> frames;
    std::shared_ptr<Workspace> workspace; // owns audio_path and frame files
};

struct ProbeInfo {
    double duration_s = 0.0;
    bool has_audio = false;
    bool still_image = false;
    int width = 0;
    int height = 0;
};

/// Client for the shortcheck-decode subprocess (see docs/decoder.md).
/// Maps the tool's exit codes onto Unreadable / Unsupported errors.
class Decoder {
public:
    explicit Decoder(std::filesystem::path executable);

    [[nodiscard]] ProbeInfo probe(const std::filesystem::path& media) const;
    [[nodiscard]] std::vector<FrameSample> extract_frames(const std::filesystem::path& media,
                                                          const std::vector<double>& timestamps,
                                                          const std::filesystem::path& out_dir) const;
    // False when the media has no audio stream.
    bool extract_audio(const std::filesystem::path& media, const std::filesystem::path& wav_out) const;

    [[nodiscard]] const std::filesystem::path& executable() const { return executable_; }

private:
    std::filesystem::path executable_;
};

/// Locates the decoder: explicit path, then $SHORTCHECK_DECODER, then a
/// shortcheck-decode next to the running executable, then PATH.
std::filesystem::path find_decoder(const std::string& configured);

// Turns a source string (local path or URL) into a readable local file.
class SourceResolver {
public:
    virtual ~SourceResolver() = default;
    virtual std::filesystem::path resolve(const std::string& source, const std::filesystem::path& scratch) = 0;
};

// Accepts local paths and file:// URLs; anything else is Unreadable.
class LocalFileResolver : public SourceResolver {
public:
    std::filesystem::path resolve(const std::string& source, const std::filesystem::path& scratch) override;
};

/// Delegates URLs to an external command: `<command> <url> <scratch-dir>` must
/// print the downloaded file path on stdout and exit 0. Local paths are
/// handled without the command.
class CommandResolver : public SourceResolver {
public:
    explicit CommandResolver(std::string command) : command_(std::move(command)) {}
    std::filesystem::path resolve(const std::string& source, const std::filesystem::path& scratch) override;

private:
    std::string command_;
};

bool is_url(const std::string& source);

struct IngestOptions {
    std::filesystem::path work_root; // empty: system temp directory
    std::optional<std::string> language_hint;
};

/// Admits a video: content-hash id, duration gate (TooLong above 600 s),
/// Unsupported for still images, zero-length or non-video media, then frame
/// sampling and audio extraction into a private workspace.
MediaBundle ingest(const std::string& source, const PipelineConfig& config, const Decoder& decoder,
                   SourceResolver& resolver, const IngestOptions& options = {});

// Same as ingest() for a file that is already local, with a caller-owned
// workspace and an already computed content id.
MediaBundle ingest_resolved(const std::filesystem::path& media, const std::string& source, std::string video_id,
                            const PipelineConfig& config, const Decoder& decoder,
                            std::shared_ptr<Workspace> workspace, const IngestOptions& options = {});

// Applies the admission rules to probe output; throws TooLong or Unsupported.
void check_admissible(const ProbeInfo& info, const std::string& source);

} // namespace shortcheck::ingest
