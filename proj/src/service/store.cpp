#include "shortcheck/service/store.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <unistd.h>

#include "shortcheck/core/digest.hpp"
#include "shortcheck/core/error.hpp"

namespace shortcheck::service {

namespace fs = std::filesystem;

namespace {

// Writes `bytes` to `target` through a unique temporary file and link(2).
// Returns false when `target` already existed; its content is left alone.
bool publish(const fs::path& target, std::string_view bytes) {
    static std::atomic<unsigned long> counter{0};
    fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() /
                         (".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                          target.filename().string());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    }
    const int rc = ::link(tmp.c_str(), target.c_str());
    const int err = errno;
    std::error_code ec;
    fs::remove(tmp, ec);
    if (rc == 0) return true;
    if (err == EEXIST) return false;
    throw Error(ErrorCode::Io, "cannot publish " + target.string() + ": " + std::strerror(err));
}

std::optional<std::string> read_if_exists(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return std::nullopt;
    return read_file(path);
}

} // namespace

bool is_safe_id(std::string_view id) {
    if (id.empty() || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
               c == '_' || c == '-';
    });
}

Store::Store(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_ / "records");
    fs::create_directories(root_ / "media");
    fs::create_directories(root_ / "reports");
}

std::optional<std::string> Store::record_bytes(const std::string& video_id, const std::string& digest) const {
    if (!is_safe_id(video_id) || !is_safe_id(digest)) return std::nullopt;
    return read_if_exists(root_ / "records" / video_id / (digest + ".json"));
}

std::optional<AnalysisRecord> Store::record(const std::string& video_id, const std::string& digest) const {
    auto bytes = record_bytes(video_id, digest);
    if (!bytes) return std::nullopt;
    return parse<AnalysisRecord>(*bytes);
}

std::vector<std::string> Store::digests_for(const std::string& video_id) const {
    std::vector<std::string> out;
    if (!is_safe_id(video_id)) return out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root_ / "records" / video_id, ec)) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() == ".json" && name[0] != '.') out.push_back(entry.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string Store::put_record(const AnalysisRecord& record) {
    if (!is_safe_id(record.video_id) || !is_safe_id(record.config_digest)) {
        throw Error(ErrorCode::BadRequest, "record key is not a safe identifier");
    }
    const fs::path target = root_ / "records" / record.video_id / (record.config_digest + ".json");
    const std::string bytes = canonical_serialize(record);
    if (publish(target, bytes)) return bytes;
    return read_file(target);
}

fs::path Store::put_media(std::string_view bytes, const std::string& extension) {
    std::string ext = extension;
    if (!ext.empty() && ext[0] != '.') ext = "." + ext;
    if (!ext.empty() && !is_safe_id(ext.substr(1))) ext.clear();
    const fs::path target = root_ / "media" / (sha256_hex(bytes) + ext);
    publish(target, bytes);
    return target;
}

void Store::put_report(const std::string& id, const eval::EvalReport& report) {
    if (!is_safe_id(id)) throw Error(ErrorCode::BadRequest, "report id is not a safe identifier: " + id);
    const fs::path target = root_ / "reports" / (id + ".json");
    if (!publish(target, canonical_serialize(report))) {
        throw Error(ErrorCode::Io, "report '" + id + "' already exists");
    }
}

std::optional<eval::EvalReport> Store::report(const std::string& id) const {
    if (!is_safe_id(id)) return std::nullopt;
    auto bytes = read_if_exists(root_ / "reports" / (id + ".json"));
    if (!bytes) return std::nullopt;
    return parse<eval::EvalReport>(*bytes);
}

std::vector<std::string> Store::report_ids() const {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root_ / "reports", ec)) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() == ".json" && name[0] != '.') out.push_back(entry.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace shortcheck::service
