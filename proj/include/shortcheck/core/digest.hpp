#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace shortcheck {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

std::string read_file(const std::filesystem::path& path);

} // namespace shortcheck
