// shortcheck-decode: media decoding helper invoked as a subprocess by the
// ingest stage. The command-line contract is documented in docs/decoder.md.
//
//   probe  <input>                         JSON metadata on stdout
//   frames <input> <out-dir> <t>...        PNG per timestamp, JSON list on stdout
//   audio  <input> <out.wav>               16 kHz mono PCM16 WAV
//   synth  <output> [options]              deterministic test clip
//
// Exit codes: 0 ok, 1 internal error, 2 usage, 3 unreadable input,
// 4 unsupported input (no video stream), 5 no audio stream.

extern "C" {
#include <libavcodec/avcodec.h>
#include <libavformat/avformat.h>
#include <libavutil/channel_layout.h>
#include <libavutil/imgutils.h>
#include <libavutil/opt.h>
#include <libswresample/swresample.h>
#include <libswscale/swscale.h>
}

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kUnreadable = 3, kUnsupported = 4, kNoAudio = 5 };

struct DecodeFailure {
    int exit_code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& msg) { throw DecodeFailure{code, msg}; }

std::string av_error(int err) {
    char buf[AV_ERROR_MAX_STRING_SIZE] = {0};
    av_strerror(err, buf, sizeof(buf));
    return buf;
}

struct FormatCloser {
    void operator()(AVFormatContext* ctx) const { avformat_close_input(&ctx); }
};
struct CodecCtxFree {
    void operator()(AVCodecContext* ctx) const { avcodec_free_context(&ctx); }
};
struct FrameFree {
    void operator()(AVFrame* f) const { av_frame_free(&f); }
};
struct PacketFree {
    void operator()(AVPacket* p) const { av_packet_free(&p); }
};
struct SwsFree {
    void operator()(SwsContext* s) const { sws_freeContext(s); }
};
struct SwrFree {
    void operator()(SwrContext* s) const { swr_free(&s); }
};

using FormatPtr = std::unique_ptr<AVFormatContext, FormatCloser>;
using CodecPtr = std::unique_ptr<AVCodecContext, CodecCtxFree>;
using FramePtr = std::unique_ptr<AVFrame, FrameFree>;
using PacketPtr = std::unique_ptr<AVPacket, PacketFree>;

FormatPtr open_input(const std::string& path) {
    AVFormatContext* raw = nullptr;
    if (int err = avformat_open_input(&raw, path.c_str(), nullptr, nullptr); err < 0) {
        fail(kUnreadable, "cannot open " + path + ": " + av_error(err));
    }
    FormatPtr fmt(raw);
    if (int err = avformat_find_stream_info(fmt.get(), nullptr); err < 0) {
        fail(kUnreadable, "cannot read stream info: " + av_error(err));
    }
    return fmt;
}

CodecPtr open_decoder(AVStream* stream) {
    const AVCodec* codec = avcodec_find_decoder(stream->codecpar->codec_id);
    if (!codec) fail(kUnreadable, "no decoder for stream");
    CodecPtr ctx(avcodec_alloc_context3(codec));
    avcodec_parameters_to_context(ctx.get(), stream->codecpar);
    ctx->thread_count = 1; // bit-exact, order-stable output
    ctx->flags |= AV_CODEC_FLAG_BITEXACT;
    if (int err = avcodec_open2(ctx.get(), codec, nullptr); err < 0) {
        fail(kUnreadable, "cannot open decoder: " + av_error(err));
    }
    return ctx;
}

bool is_still_image(const AVFormatContext* fmt, const AVStream* video) {
    const std::string name = fmt->iformat->name;
    if (name.find("image2") != std::string::npos || name.find("_pipe") != std::string::npos) return true;
    return video->disposition & AV_DISPOSITION_ATTACHED_PIC;
}

// Video stream duration when the container records one (audio priming can
// stretch the container duration), otherwise the container duration.
double duration_of(const AVFormatContext* fmt, const AVStream* video) {
    if (video && video->duration != AV_NOPTS_VALUE && video->duration > 0) {
        return static_cast<double>(video->duration) * av_q2d(video->time_base);
    }
    if (fmt->duration != AV_NOPTS_VALUE && fmt->duration > 0) {
        return static_cast<double>(fmt->duration) / AV_TIME_BASE;
    }
    return 0.0;
}

int cmd_probe(const std::string& input) {
    auto fmt = open_input(input);
    const int v = av_find_best_stream(fmt.get(), AVMEDIA_TYPE_VIDEO, -1, -1, nullptr, 0);
    const int a = av_find_best_stream(fmt.get(), AVMEDIA_TYPE_AUDIO, -1, -1, nullptr, 0);
    if (v < 0) fail(kUnsupported, "no video stream");
    AVStream* video = fmt->streams[v];
    nlohmann::json out{
        {"duration_s", duration_of(fmt.get(), video)},
        {"has_video", true},
        {"has_audio", a >= 0},
        {"width", video->codecpar->width},
        {"height", video->codecpar->height},
        {"still_image", is_still_image(fmt.get(), video)},
        {"format", fmt->iformat->name},
    };
    std::cout << out.dump() << "\n";
    return kOk;
}

std::vector<uint8_t> encode_png(const AVFrame* rgb) {
    const AVCodec* codec = avcodec_find_encoder(AV_CODEC_ID_PNG);
    if (!codec) fail(kInternal, "png encoder unavailable");
    CodecPtr ctx(avcodec_alloc_context3(codec));
    ctx->width = rgb->width;
    ctx->height = rgb->height;
    ctx->pix_fmt = AV_PIX_FMT_RGB24;
    ctx->time_base = AVRational{1, 1};
    ctx->flags |= AV_CODEC_FLAG_BITEXACT;
    if (int err = avcodec_open2(ctx.get(), codec, nullptr); err < 0) fail(kInternal, "png open: " + av_error(err));
    PacketPtr pkt(av_packet_alloc());
    if (int err = avcodec_send_frame(ctx.get(), rgb); err < 0) fail(kInternal, "png encode: " + av_error(err));
    avcodec_send_frame(ctx.get(), nullptr);
    std::vector<uint8_t> out;
    while (avcodec_receive_packet(ctx.get(), pkt.get()) == 0) {
        out.insert(out.end(), pkt->data, pkt->data + pkt->size);
        av_packet_unref(pkt.get());
    }
    return out;
}

FramePtr to_rgb(const AVFrame* src) {
    std::unique_ptr<SwsContext, SwsFree> sws(sws_getContext(src->width, src->height, static_cast<AVPixelFormat>(src->format),
                                                            src->width, src->height, AV_PIX_FMT_RGB24,
                                                            SWS_BILINEAR | SWS_BITEXACT | SWS_ACCURATE_RND, nullptr,
                                                            nullptr, nullptr));
    if (!sws) fail(kInternal, "swscale init failed");
    FramePtr rgb(av_frame_alloc());
    rgb->format = AV_PIX_FMT_RGB24;
    rgb->width = src->width;
    rgb->height = src->height;
    av_frame_get_buffer(rgb.get(), 0);
    sws_scale(sws.get(), src->data, src->linesize, 0, src->height, rgb->data, rgb->linesize);
    return rgb;
}

int cmd_frames(const std::string& input, const std::string& out_dir, const std::vector<double>& timestamps) {
    auto fmt = open_input(input);
    const int v = av_find_best_stream(fmt.get(), AVMEDIA_TYPE_VIDEO, -1, -1, nullptr, 0);
    if (v < 0) fail(kUnsupported, "no video stream");
    AVStream* stream = fmt->streams[v];
    auto dec = open_decoder(stream);
    std::filesystem::create_directories(out_dir);

    const double tb = av_q2d(stream->time_base);
    const double start = stream->start_time != AV_NOPTS_VALUE ? static_cast<double>(stream->start_time) * tb : 0.0;

    nlohmann::json listing = nlohmann::json::array();
    std::size_t next = 0;
    FramePtr held; // latest decoded frame at or before the pending timestamp
    PacketPtr pkt(av_packet_alloc());
    FramePtr frame(av_frame_alloc());

    auto emit = [&](const AVFrame* f) {
        auto rgb = to_rgb(f);
        const auto png = encode_png(rgb.get());
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%05zu.png", next);
        const auto path = (std::filesystem::path(out_dir) / name).string();
        std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(png.data()),
                                                    static_cast<std::streamsize>(png.size()));
        listing.push_back({{"index", next}, {"timestamp_s", timestamps[next]}, {"path", path},
                           {"width", f->width}, {"height", f->height}});
        ++next;
    };

    auto consume = [&](AVFrame* f) {
        const int64_t pts = f->best_effort_timestamp != AV_NOPTS_VALUE ? f->best_effort_timestamp : f->pts;
        const double t = pts == AV_NOPTS_VALUE ? 0.0 : static_cast<double>(pts) * tb - start;
        while (next < timestamps.size() && t > timestamps[next] + 1e-9) {
            emit(held ? held.get() : f);
        }
        if (!held) held.reset(av_frame_alloc());
        av_frame_unref(held.get());
        av_frame_ref(held.get(), f);
    };

    auto drain = [&] {
        while (avcodec_receive_frame(dec.get(), frame.get()) == 0) {
            consume(frame.get());
            av_frame_unref(frame.get());
        }
    };

    while (next < timestamps.size() && av_read_frame(fmt.get(), pkt.get()) >= 0) {
        if (pkt->stream_index == v) {
            avcodec_send_packet(dec.get(), pkt.get());
            drain();
        }
        av_packet_unref(pkt.get());
    }
    avcodec_send_packet(dec.get(), nullptr);
    drain();
    if (!held) fail(kUnreadable, "no decodable video frames");
    while (next < timestamps.size()) emit(held.get());

    std::cout << listing.dump() << "\n";
    return kOk;
}

void write_wav(const std::string& path, const std::vector<int16_t>& samples, int rate) {
    std::ofstream out(path, std::ios::binary);
    auto u32 = [&](uint32_t x) { out.write(reinterpret_cast<const char*>(&x), 4); };
    auto u16 = [&](uint16_t x) { out.write(reinterpret_cast<const char*>(&x), 2); };
    const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
    out.write("RIFF", 4);
    u32(36 + data_bytes);
    out.write("WAVEfmt ", 8);
    u32(16);
    u16(1); // PCM
    u16(1); // mono
    u32(static_cast<uint32_t>(rate));
    u32(static_cast<uint32_t>(rate * 2));
    u16(2);
    u16(16);
    out.write("data", 4);
    u32(data_bytes);
    out.write(reinterpret_cast<const char*>(samples.data()), data_bytes);
}

int cmd_audio(const std::string& input, const std::string& output) {
    constexpr int kRate = 16000;
    auto fmt = open_input(input);
    const int a = av_find_best_stream(fmt.get(), AVMEDIA_TYPE_AUDIO, -1, -1, nullptr, 0);
    if (a < 0) fail(kNoAudio, "no audio stream");
    auto dec = open_decoder(fmt->streams[a]);
    const int64_t in_layout =
        dec->channel_layout ? static_cast<int64_t>(dec->channel_layout) : av_get_default_channel_layout(dec->channels);
    std::unique_ptr<SwrContext, SwrFree> swr(swr_alloc_set_opts(nullptr, AV_CH_LAYOUT_MONO, AV_SAMPLE_FMT_S16, kRate,
                                                                in_layout, dec->sample_fmt, dec->sample_rate, 0,
                                                                nullptr));
    if (!swr || swr_init(swr.get()) < 0) fail(kInternal, "swresample init failed");

    std::vector<int16_t> samples;
    auto convert = [&](const AVFrame* f) {
        const int cap = swr_get_out_samples(swr.get(), f ? f->nb_samples : 0);
        if (cap <= 0) return;
        std::vector<int16_t> buf(static_cast<std::size_t>(cap));
        uint8_t* out_planes[1] = {reinterpret_cast<uint8_t*>(buf.data())};
        const int got = swr_convert(swr.get(), out_planes, cap, f ? const_cast<const uint8_t**>(f->extended_data) : nullptr,
                                    f ? f->nb_samples : 0);
        if (got > 0) samples.insert(samples.end(), buf.begin(), buf.begin() + got);
    };

    PacketPtr pkt(av_packet_alloc());
    FramePtr frame(av_frame_alloc());
    auto drain = [&] {
        while (avcodec_receive_frame(dec.get(), frame.get()) == 0) {
            convert(frame.get());
            av_frame_unref(frame.get());
        }
    };
    while (av_read_frame(fmt.get(), pkt.get()) >= 0) {
        if (pkt->stream_index == a) {
            avcodec_send_packet(dec.get(), pkt.get());
            drain();
        }
        av_packet_unref(pkt.get());
    }
    avcodec_send_packet(dec.get(), nullptr);
    drain();
    convert(nullptr);
    write_wav(output, samples, kRate);
    return kOk;
}

struct SynthOptions {
    double duration = 5.0;
    int fps = 2;
    int width = 64;
    int height = 64;
    std::string audio = "tone"; // tone | silence | none
    double tone_hz = 440.0;
    int seed = 0;
};

int cmd_synth(const std::string& output, const SynthOptions& opt) {
    AVFormatContext* raw = nullptr;
    if (avformat_alloc_output_context2(&raw, nullptr, nullptr, output.c_str()) < 0 || !raw) {
        fail(kInternal, "cannot create output " + output);
    }
    std::unique_ptr<AVFormatContext, void (*)(AVFormatContext*)> oc(raw, [](AVFormatContext* c) {
        if (c->pb) avio_closep(&c->pb);
        avformat_free_context(c);
    });
    oc->flags |= AVFMT_FLAG_BITEXACT;

    const AVCodec* vcodec = avcodec_find_encoder(AV_CODEC_ID_MPEG4);
    AVStream* vs = avformat_new_stream(oc.get(), nullptr);
    CodecPtr venc(avcodec_alloc_context3(vcodec));
    venc->width = opt.width;
    venc->height = opt.height;
    venc->pix_fmt = AV_PIX_FMT_YUV420P;
    venc->time_base = AVRational{1, opt.fps};
    venc->framerate = AVRational{opt.fps, 1};
    venc->gop_size = opt.fps;
    venc->bit_rate = 200000;
    venc->thread_count = 1;
    venc->flags |= AV_CODEC_FLAG_BITEXACT;
    if (oc->oformat->flags & AVFMT_GLOBALHEADER) venc->flags |= AV_CODEC_FLAG_GLOBAL_HEADER;
    if (avcodec_open2(venc.get(), vcodec, nullptr) < 0) fail(kInternal, "mpeg4 encoder open failed");
    avcodec_parameters_from_context(vs->codecpar, venc.get());
    vs->time_base = venc->time_base;

    CodecPtr aenc;
    AVStream* as = nullptr;
    if (opt.audio != "none") {
        const AVCodec* acodec = avcodec_find_encoder(AV_CODEC_ID_AAC);
        as = avformat_new_stream(oc.get(), nullptr);
        aenc.reset(avcodec_alloc_context3(acodec));
        aenc->sample_fmt = AV_SAMPLE_FMT_FLTP;
        aenc->sample_rate = 16000;
        aenc->channel_layout = AV_CH_LAYOUT_MONO;
        aenc->channels = 1;
        aenc->bit_rate = 32000;
        aenc->time_base = AVRational{1, 16000};
        aenc->thread_count = 1;
        aenc->flags |= AV_CODEC_FLAG_BITEXACT;
        if (oc->oformat->flags & AVFMT_GLOBALHEADER) aenc->flags |= AV_CODEC_FLAG_GLOBAL_HEADER;
        if (avcodec_open2(aenc.get(), acodec, nullptr) < 0) fail(kInternal, "aac encoder open failed");
        avcodec_parameters_from_context(as->codecpar, aenc.get());
        as->time_base = aenc->time_base;
    }

    if (!(oc->oformat->flags & AVFMT_NOFILE) && avio_open(&oc->pb, output.c_str(), AVIO_FLAG_WRITE) < 0) {
        fail(kInternal, "cannot write " + output);
    }
    AVDictionary* mux_opts = nullptr;
    av_dict_set(&mux_opts, "fflags", "+bitexact", 0);
    if (avformat_write_header(oc.get(), &mux_opts) < 0) fail(kInternal, "write header failed");
    av_dict_free(&mux_opts);

    PacketPtr pkt(av_packet_alloc());
    auto flush_packets = [&](AVCodecContext* enc, AVStream* st) {
        while (avcodec_receive_packet(enc, pkt.get()) == 0) {
            if (pkt->duration == 0 && enc->codec_type == AVMEDIA_TYPE_VIDEO) pkt->duration = 1;
            av_packet_rescale_ts(pkt.get(), enc->time_base, st->time_base);
            pkt->stream_index = st->index;
            av_interleaved_write_frame(oc.get(), pkt.get());
        }
    };

    const int total_frames = std::max(1, static_cast<int>(std::lround(opt.duration * opt.fps)));
    FramePtr vf(av_frame_alloc());
    vf->format = venc->pix_fmt;
    vf->width = venc->width;
    vf->height = venc->height;
    av_frame_get_buffer(vf.get(), 0);
    for (int i = 0; i < total_frames; ++i) {
        av_frame_make_writable(vf.get());
        for (int y = 0; y < vf->height; ++y) {
            for (int x = 0; x < vf->width; ++x) {
                vf->data[0][y * vf->linesize[0] + x] = static_cast<uint8_t>((x * 3 + y + i * 17 + opt.seed * 31) & 0xFF);
            }
        }
        for (int y = 0; y < vf->height / 2; ++y) {
            for (int x = 0; x < vf->width / 2; ++x) {
                vf->data[1][y * vf->linesize[1] + x] = static_cast<uint8_t>(128 + ((i * 7 + opt.seed) % 64));
                vf->data[2][y * vf->linesize[2] + x] = static_cast<uint8_t>(96 + ((i * 5) % 64));
            }
        }
        vf->pts = i;
        avcodec_send_frame(venc.get(), vf.get());
        flush_packets(venc.get(), vs);
    }
    avcodec_send_frame(venc.get(), nullptr);
    flush_packets(venc.get(), vs);

    if (aenc) {
        const int64_t total_samples = static_cast<int64_t>(std::llround(opt.duration * 16000.0));
        FramePtr af(av_frame_alloc());
        af->format = aenc->sample_fmt;
        af->channel_layout = aenc->channel_layout;
        af->channels = 1;
        af->sample_rate = 16000;
        af->nb_samples = aenc->frame_size;
        av_frame_get_buffer(af.get(), 0);
        for (int64_t pos = 0; pos < total_samples; pos += aenc->frame_size) {
            av_frame_make_writable(af.get());
            auto* data = reinterpret_cast<float*>(af->data[0]);
            for (int k = 0; k < aenc->frame_size; ++k) {
                const double t = static_cast<double>(pos + k) / 16000.0;
                data[k] = opt.audio == "tone" ? static_cast<float>(0.2 * std::sin(2.0 * M_PI * opt.tone_hz * t)) : 0.0f;
            }
            af->pts = pos;
            avcodec_send_frame(aenc.get(), af.get());
            flush_packets(aenc.get(), as);
        }
        avcodec_send_frame(aenc.get(), nullptr);
        flush_packets(aenc.get(), as);
    }

    av_write_trailer(oc.get());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    av_log_set_level(AV_LOG_ERROR);
    CLI::App app{"shortcheck media decoder"};
    app.require_subcommand(1);

    std::string input, out_dir, output;
    std::vector<double> timestamps;
    auto* probe = app.add_subcommand("probe", "print container metadata as JSON");
    probe->add_option("input", input)->required();

    auto* frames = app.add_subcommand("frames", "extract PNG frames at timestamps");
    frames->add_option("input", input)->required();
    frames->add_option("out_dir", out_dir)->required();
    frames->add_option("timestamps", timestamps)->required();

    auto* audio = app.add_subcommand("audio", "extract 16 kHz mono PCM16 WAV");
    audio->add_option("input", input)->required();
    audio->add_option("output", output)->required();

    SynthOptions synth_opt;
    auto* synth = app.add_subcommand("synth", "write a deterministic test clip");
    synth->add_option("output", output)->required();
    synth->add_option("--duration", synth_opt.duration);
    synth->add_option("--fps", synth_opt.fps)->check(CLI::PositiveNumber);
    synth->add_option("--width", synth_opt.width)->check(CLI::PositiveNumber);
    synth->add_option("--height", synth_opt.height)->check(CLI::PositiveNumber);
    synth->add_option("--audio", synth_opt.audio)->check(CLI::IsMember({"tone", "silence", "none"}));
    synth->add_option("--tone-hz", synth_opt.tone_hz);
    synth->add_option("--seed", synth_opt.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*probe) return cmd_probe(input);
        if (*frames) return cmd_frames(input, out_dir, timestamps);
        if (*audio) return cmd_audio(input, output);
        if (*synth) return cmd_synth(output, synth_opt);
    } catch (const DecodeFailure& f) {
        std::cerr << "shortcheck-decode: " << f.message << "\n";
        return f.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "shortcheck-decode: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
