#include "shortcheck/ingest/media.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <unistd.h>

#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"
#include "shortcheck/core/process.hpp"
#include "shortcheck/core/serialize.hpp"

namespace shortcheck::ingest {

namespace fs = std::filesystem;

namespace {

constexpr int kExitUnsupported = 4;
constexpr int kExitNoAudio = 5;

[[noreturn]] void raise_for(const ProcessResult& r, const std::string& what) {
    std::string detail = r.stderr_text;
    while (!detail.empty() && (detail.back() == '\n' || detail.back() == '\r')) detail.pop_back();
    const std::string msg = what + (detail.empty() ? "" : ": " + detail);
    if (r.exit_code == kExitUnsupported) throw Error(ErrorCode::Unsupported, msg);
    throw Error(ErrorCode::Unreadable, msg);
}

std::string format_timestamp(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", t);
    return buf;
}

} // namespace

std::vector<double> sample_frames(double duration_s, double rate_hz, int max_frames) {
    std::vector<double> out;
    if (!(duration_s > 0.0) || !(rate_hz > 0.0) || max_frames < 1) {
        out.push_back(0.0);
        return out;
    }
    for (long k = 0;; ++k) {
        const double t = static_cast<double>(k) / rate_hz;
        if (t >= duration_s) break;
        out.push_back(t);
    }
    if (out.empty()) out.push_back(0.0);
    if (out.size() > static_cast<std::size_t>(max_frames)) {
        out.clear();
        if (max_frames == 1) {
            out.push_back(0.0);
        } else {
            const double span = duration_s - 1.0 / rate_hz;
            for (int k = 0; k < max_frames; ++k) {
                out.push_back(span * static_cast<double>(k) / static_cast<double>(max_frames - 1));
            }
        }
    }
    return out;
}

Workspace::Workspace(const fs::path& root) {
    fs::create_directories(root);
    std::string pattern = (root / "ingest-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) {
        throw Error(ErrorCode::Io, "cannot create workspace under " + root.string());
    }
    path_ = pattern;
}

Workspace::~Workspace() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

Decoder::Decoder(fs::path executable) : executable_(std::move(executable)) {}

ProbeInfo Decoder::probe(const fs::path& media) const {
    const auto r = run_process({executable_.string(), "probe", media.string()});
    if (r.exit_code != 0) raise_for(r, "probe " + media.string());
    try {
        const auto j = Json::parse(r.stdout_text);
        ProbeInfo info;
        info.duration_s = j.at("duration_s").get<double>();
        info.has_audio = j.at("has_audio").get<bool>();
        info.still_image = j.value("still_image", false);
        info.width = j.value("width", 0);
        info.height = j.value("height", 0);
        return info;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::Unreadable, std::string("decoder probe output: ") + e.what());
    }
}

std::vector<FrameSample> Decoder::extract_frames(const fs::path& media, const std::vector<double>& timestamps,
                                                 const fs::path& out_dir) const {
    std::vector<std::string> argv{executable_.string(), "frames", media.string(), out_dir.string()};
    for (double t : timestamps) argv.push_back(format_timestamp(t));
    const auto r = run_process(argv);
    if (r.exit_code != 0) raise_for(r, "frame extraction");
    std::vector<FrameSample> frames;
    try {
        const auto listing = Json::parse(r.stdout_text);
        for (const auto& item : listing) {
            FrameSample f;
            f.index = item.at("index").get<int>();
            f.timestamp_s = timestamps.at(static_cast<std::size_t>(f.index));
            f.width = item.at("width").get<int>();
            f.height = item.at("height").get<int>();
            f.image_bytes = read_file(item.at("path").get<std::string>());
            frames.push_back(std::move(f));
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::Unreadable, std::string("decoder frame listing: ") + e.what());
    }
    if (frames.size() != timestamps.size()) {
        throw Error(ErrorCode::Unreadable, "decoder returned " + std::to_string(frames.size()) + " frames for " +
                                               std::to_string(timestamps.size()) + " timestamps");
    }
    return frames;
}

bool Decoder::extract_audio(const fs::path& media, const fs::path& wav_out) const {
    const auto r = run_process({executable_.string(), "audio", media.string(), wav_out.string()});
    if (r.exit_code == kExitNoAudio) return false;
    if (r.exit_code != 0) raise_for(r, "audio extraction");
    return true;
}

fs::path find_decoder(const std::string& configured) {
    if (!configured.empty()) return configured;
    if (const char* env = std::getenv("SHORTCHECK_DECODER"); env && *env) return env;
    std::error_code ec;
    const auto self = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        for (const auto& candidate : {self.parent_path() / "shortcheck-decode",
                                      self.parent_path().parent_path() / "tools" / "shortcheck-decode"}) {
            if (fs::exists(candidate)) return candidate;
        }
    }
    return "shortcheck-decode";
}

bool is_url(const std::string& source) {
    const auto pos = source.find("://");
    return pos != std::string::npos && pos > 0 && source.compare(0, 7, "file://") != 0;
}

fs::path LocalFileResolver::resolve(const std::string& source, const fs::path&) {
    if (is_url(source)) {
        throw Error(ErrorCode::Unreadable, "no URL resolver configured for " + source);
    }
    fs::path p = source.compare(0, 7, "file://") == 0 ? fs::path(source.substr(7)) : fs::path(source);
    if (!fs::is_regular_file(p)) throw Error(ErrorCode::Unreadable, "not a readable file: " + source);
    return p;
}

fs::path CommandResolver::resolve(const std::string& source, const fs::path& scratch) {
    if (!is_url(source)) return LocalFileResolver{}.resolve(source, scratch);
    const auto r = run_process({command_, source, scratch.string()});
    std::string path = r.stdout_text;
    while (!path.empty() && (path.back() == '\n' || path.back() == '\r' || path.back() == ' ')) path.pop_back();
    if (r.exit_code != 0 || path.empty() || !fs::is_regular_file(path)) {
        throw Error(ErrorCode::Unreadable, "resolver failed for " + source + ": " + r.stderr_text);
    }
    return path;
}

void check_admissible(const ProbeInfo& info, const std::string& source) {
    if (info.still_image) throw Error(ErrorCode::Unsupported, "still image, not a video: " + source);
    if (!(info.duration_s > 0.0)) throw Error(ErrorCode::Unsupported, "zero-length video: " + source);
    if (info.duration_s > kMaxDurationSeconds) {
        std::ostringstream msg;
        msg << "duration " << info.duration_s << " s exceeds " << kMaxDurationSeconds << " s";
        throw Error(ErrorCode::TooLong, msg.str());
    }
}

MediaBundle ingest_resolved(const fs::path& media, const std::string& source, std::string video_id,
                            const PipelineConfig& config, const Decoder& decoder,
                            std::shared_ptr<Workspace> workspace, const IngestOptions& options) {
    MediaBundle bundle;
    bundle.workspace = workspace;
    bundle.video.id = std::move(video_id);
    bundle.video.source = source;
    bundle.video.language_hint = options.language_hint;

    const ProbeInfo info = decoder.probe(media);
    check_admissible(info, source);
    bundle.video.duration_s = info.duration_s;

    const auto timestamps = sample_frames(info.duration_s, config.frame_sample_rate_hz, config.max_frames);
    bundle.frames = decoder.extract_frames(media, timestamps, workspace->path() / "frames");

    if (info.has_audio) {
        const fs::path wav = workspace->path() / "audio.wav";
        if (decoder.extract_audio(media, wav)) bundle.audio_path = wav;
    }
    return bundle;
}

MediaBundle ingest(const std::string& source, const PipelineConfig& config, const Decoder& decoder,
                   SourceResolver& resolver, const IngestOptions& options) {
    const fs::path root = options.work_root.empty() ? fs::temp_directory_path() / "shortcheck" : options.work_root;
    auto workspace = std::make_shared<Workspace>(root);
    const fs::path media = resolver.resolve(source, workspace->path());
    return ingest_resolved(media, source, sha256_file(media), config, decoder, workspace, options);
}

} // namespace shortcheck::ingest
