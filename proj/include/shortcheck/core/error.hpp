#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shortcheck {

enum class ErrorCode {
    TooLong,
    Unreadable,
    Unsupported,
    BackendUnavailable,
    BadAudio,
    EmptyInput,
    BadLexicon,
    LengthMismatch,
    Empty,
    UnknownModule,
    InvalidConfig,
    BadRequest,
    NotFound,
    Parse,
    Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace shortcheck
