#include "shortcheck/backends/clients.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <set>

#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"

namespace shortcheck::backends {

namespace {

std::string trim(std::string_view s) {
    const auto ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::string lower_ascii(std::string s) {
    for (auto& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

// Runs `f` over a backend reply, turning schema violations into
// BackendUnavailable so callers see one failure kind per backend.
template <typename F>
auto decode(const BackendClient& client, std::string_view op, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::BackendUnavailable,
                    client.endpoint().name + " " + std::string(op) + ": malformed response: " + e.what());
    }
}

Json frames_input(const std::vector<ingest::FrameSample>& frames) {
    Json list = Json::array();
    for (const auto& f : frames) {
        list.push_back(Json{{"index", f.index}, {"png_b64", base64_encode(f.image_bytes)}});
    }
    return Json{{"frames", std::move(list)}};
}

std::uint32_t le32(const std::string& b, std::size_t at) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t le16(const std::string& b, std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                      static_cast<unsigned char>(b[at + 1]) << 8);
}

void check_wav_bytes(const std::string& b, const std::string& name) {
    auto bad = [&](const std::string& why) { throw Error(ErrorCode::BadAudio, name + ": " + why); };
    if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0) bad("not a RIFF/WAVE file");
    std::size_t pos = 12;
    bool have_fmt = false;
    bool have_data = false;
    while (pos + 8 <= b.size()) {
        const std::string id = b.substr(pos, 4);
        const std::uint32_t size = le32(b, pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > b.size()) bad("truncated chunk '" + id + "'");
        if (id == "fmt ") {
            if (size < 16) bad("short fmt chunk");
            if (le16(b, body) != 1) bad("not PCM");
            if (le16(b, body + 2) != 1) bad("not mono");
            if (le32(b, body + 4) != 16000) bad("sample rate is not 16000 Hz");
            if (le16(b, body + 14) != 16) bad("not 16-bit");
            have_fmt = true;
        } else if (id == "data") {
            have_data = true;
        }
        pos = body + size + (size & 1U);
    }
    if (!have_fmt) bad("missing fmt chunk");
    if (!have_data) bad("missing data chunk");
}

} // namespace

void check_wav(const std::filesystem::path& path) {
    std::string bytes;
    try {
        bytes = read_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::BadAudio, e.what());
    }
    check_wav_bytes(bytes, path.string());
}

Transcript transcribe(const BackendClient& client, const std::filesystem::path& audio,
                      const std::optional<std::string>& lang_hint) {
    std::string bytes;
    try {
        bytes = read_file(audio);
    } catch (const Error& e) {
        throw Error(ErrorCode::BadAudio, e.what());
    }
    check_wav_bytes(bytes, audio.string());

    Json input{{"audio_wav_b64", base64_encode(bytes)}};
    if (lang_hint) input["lang_hint"] = *lang_hint;
    const Json reply = client.call(ops::kTranscribe, std::move(input));

    return decode(client, ops::kTranscribe, [&] {
        Transcript t;
        t.detected_lang = reply.value("language", lang_hint.value_or("und"));
        if (reply.contains("segments")) {
            for (const auto& s : reply.at("segments")) {
                Segment seg{s.at("t0").get<double>(), s.at("t1").get<double>(), s.at("text").get<std::string>()};
                const std::string piece = trim(seg.text);
                if (!piece.empty()) t.text += (t.text.empty() ? "" : " ") + piece;
                t.segments.push_back(std::move(seg));
            }
        } else {
            t.text = trim(reply.value("text", std::string()));
        }
        return t;
    });
}

std::string join_overlay(const std::vector<FrameText>& per_frame) {
    std::vector<FrameText> ordered = per_frame;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const FrameText& a, const FrameText& b) { return a.index < b.index; });
    std::string out;
    std::string previous;
    for (const auto& f : ordered) {
        const std::string text = trim(f.text);
        if (text.empty() || text == previous) continue;
        if (!out.empty()) out += " | ";
        out += text;
        previous = text;
    }
    return out;
}

OcrResult ocr_frames(const BackendClient& client, const std::vector<ingest::FrameSample>& frames) {
    if (frames.empty()) throw Error(ErrorCode::EmptyInput, "ocr_frames needs at least one frame");
    const Json reply = client.call(ops::kOcr, frames_input(frames));
    return decode(client, ops::kOcr, [&] {
        OcrResult r;
        for (const auto& f : reply.at("frames")) {
            FrameText ft;
            ft.index = f.at("index").get<int>();
            ft.text = f.value("text", std::string());
            if (f.contains("boxes")) {
                for (const auto& b : f.at("boxes")) {
                    ft.boxes.push_back(Box{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                                           b.at(3).get<int>()});
                }
            }
            r.per_frame.push_back(std::move(ft));
        }
        std::stable_sort(r.per_frame.begin(), r.per_frame.end(),
                         [](const FrameText& a, const FrameText& b) { return a.index < b.index; });
        r.overlay_text = join_overlay(r.per_frame);
        return r;
    });
}

std::vector<std::string> caption_frames(const BackendClient& client,
                                        const std::vector<ingest::FrameSample>& frames) {
    if (frames.empty()) throw Error(ErrorCode::EmptyInput, "caption_frames needs at least one frame");
    const Json reply = client.call(ops::kCaption, frames_input(frames));
    auto captions = decode(client, ops::kCaption,
                           [&] { return reply.at("captions").get<std::vector<std::string>>(); });
    if (captions.size() != frames.size()) {
        throw Error(ErrorCode::BackendUnavailable, client.endpoint().name + ": got " +
                                                       std::to_string(captions.size()) + " captions for " +
                                                       std::to_string(frames.size()) + " frames");
    }
    return captions;
}

PromptTemplate::PromptTemplate(std::string name, std::string text, DecodingParams params)
    : name_(std::move(name)), text_(std::move(text)), params_(std::move(params)) {
    std::set<std::string> seen;
    for (std::size_t pos = 0; (pos = text_.find('{', pos)) != std::string::npos;) {
        const auto close = text_.find('}', pos);
        if (close == std::string::npos) break;
        std::string key = text_.substr(pos + 1, close - pos - 1);
        const bool identifier =
            !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
                return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
            });
        if (identifier && seen.insert(key).second) placeholders_.push_back(key);
        pos = identifier ? close + 1 : pos + 1;
    }
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
    for (const auto& p : placeholders_) {
        if (!values.count(p)) throw Error(ErrorCode::InvalidConfig, name_ + ": no value for {" + p + "}");
    }
    for (const auto& [key, _] : values) {
        if (std::find(placeholders_.begin(), placeholders_.end(), key) == placeholders_.end()) {
            throw Error(ErrorCode::InvalidConfig, name_ + ": template has no placeholder {" + key + "}");
        }
    }
    std::string out;
    std::size_t pos = 0;
    while (pos < text_.size()) {
        const auto open = text_.find('{', pos);
        if (open == std::string::npos) break;
        const auto close = text_.find('}', open);
        if (close == std::string::npos) break;
        auto it = values.find(text_.substr(open + 1, close - open - 1));
        if (it == values.end()) {
            out.append(text_, pos, open + 1 - pos);
            pos = open + 1;
            continue;
        }
        out.append(text_, pos, open - pos);
        out += it->second;
        pos = close + 1;
    }
    out.append(text_, pos, std::string::npos);
    return out;
}

const PromptTemplate& classification_prompt() {
    static const PromptTemplate kPrompt(
        "summarize_and_classify",
        "You review short social media videos for a fact-checking desk.\n"
        "\n"
        "Frame captions, in order:\n"
        "{captions}\n"
        "\n"
        "Speech transcript:\n"
        "{transcript}\n"
        "\n"
        "On-screen text:\n"
        "{overlay_text}\n"
        "\n"
        "Write a one or two sentence summary of the video. Then classify the transcript, the summary and\n"
        "the on-screen text, each as exactly one of: political, hostile, benign, promotional,\n"
        "contentious-issue. Finally say whether the video is an advertisement.\n"
        "Answer with exactly these five lines:\n"
        "summary: <summary>\n"
        "transcript_verdict: <class>\n"
        "summary_verdict: <class>\n"
        "overlay_verdict: <class>\n"
        "advertisement: <yes|no>\n",
        DecodingParams{0.0, {"\n\n"}, 512});
    return kPrompt;
}

Classification parse_classification(const std::string& reply) {
    Classification c;
    std::size_t pos = 0;
    while (pos <= reply.size()) {
        auto end = reply.find('\n', pos);
        if (end == std::string::npos) end = reply.size();
        const std::string line = trim(std::string_view(reply).substr(pos, end - pos));
        pos = end + 1;
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = lower_ascii(trim(std::string_view(line).substr(0, colon)));
        // Tolerate markdown bullets and emphasis around the key.
        const auto first = key.find_first_not_of("*- ");
        const auto last = key.find_last_not_of("* ");
        key = first == std::string::npos ? std::string() : key.substr(first, last - first + 1);
        std::replace(key.begin(), key.end(), ' ', '_');
        std::replace(key.begin(), key.end(), '-', '_');
        const std::string value = trim(std::string_view(line).substr(colon + 1));
        if (key == "summary") {
            c.video_summary = value;
        } else if (key == "transcript_verdict") {
            c.transcript_verdict = parse_semantic_class(value);
        } else if (key == "summary_verdict") {
            c.summary_verdict = parse_semantic_class(value);
        } else if (key == "overlay_verdict") {
            c.overlay_verdict = parse_semantic_class(value);
        } else if (key == "advertisement") {
            const std::string v = lower_ascii(value);
            c.is_advertisement = v.rfind("yes", 0) == 0 || v.rfind("true", 0) == 0;
        }
    }
    return c;
}

Classification summarize_and_classify(const BackendClient& client, const std::vector<std::string>& captions,
                                      const std::string& transcript, const std::string& overlay_text,
                                      const PromptTemplate& prompt) {
    const bool have_captions =
        std::any_of(captions.begin(), captions.end(), [](const std::string& c) { return !trim(c).empty(); });
    if (!have_captions && trim(transcript).empty() && trim(overlay_text).empty()) {
        throw Error(ErrorCode::EmptyInput, "no captions, transcript or overlay text to classify");
    }
    std::string caption_block;
    for (std::size_t i = 0; i < captions.size(); ++i) {
        caption_block += std::to_string(i) + ": " + captions[i] + "\n";
    }
    if (caption_block.empty()) caption_block = "(none)\n";
    caption_block.pop_back();
    const std::string rendered = prompt.render({
        {"captions", caption_block},
        {"transcript", trim(transcript).empty() ? "(none)" : transcript},
        {"overlay_text", trim(overlay_text).empty() ? "(none)" : overlay_text},
    });
    const auto& p = prompt.params();
    const Json reply = client.call(ops::kGenerate, Json{{"prompt", rendered},
                                                        {"temperature", p.temperature},
                                                        {"stop", p.stop},
                                                        {"max_tokens", p.max_tokens}});
    const auto text = decode(client, ops::kGenerate, [&] { return reply.at("text").get<std::string>(); });
    return parse_classification(text);
}

namespace {

DeepfakeResult deepfake_request(const BackendClient& client, Json input, std::size_t expected) {
    if (expected == 0) throw Error(ErrorCode::EmptyInput, "deepfake_score needs at least one frame");
    const Json reply = client.call(ops::kDeepfake, std::move(input));
    auto result = decode(client, ops::kDeepfake, [&] {
        DeepfakeResult r;
        for (const auto& f : reply.at("frames")) {
            FrameScore s;
            s.index = f.at("index").get<int>();
            s.face = f.at("face").get<bool>();
            s.score = f.value("score", 0.0);
            r.per_frame.push_back(s);
        }
        return r;
    });
    double sum = 0.0;
    std::size_t faces = 0;
    for (const auto& s : result.per_frame) {
        if (!(s.score >= 0.0 && s.score <= 1.0)) {
            throw Error(ErrorCode::BackendUnavailable,
                        client.endpoint().name + ": frame score outside [0,1]");
        }
        if (s.face) {
            sum += s.score;
            ++faces;
        }
    }
    if (faces > 0) result.score = sum / static_cast<double>(faces);
    return result;
}

} // namespace

DeepfakeResult deepfake_score(const BackendClient& client, const std::vector<ingest::FrameSample>& frames) {
    return deepfake_request(client, frames_input(frames), frames.size());
}

DeepfakeResult deepfake_score_images(const BackendClient& client, const std::vector<std::string>& images) {
    Json list = Json::array();
    for (std::size_t i = 0; i < images.size(); ++i) {
        list.push_back(Json{{"index", static_cast<int>(i)}, {"png_b64", base64_encode(images[i])}});
    }
    return deepfake_request(client, Json{{"frames", std::move(list)}}, images.size());
}

} // namespace shortcheck::backends
