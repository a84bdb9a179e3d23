#include "shortcheck/core/error.hpp"

namespace shortcheck {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::Unreadable: return "Unreadable";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::BadAudio: return "BadAudio";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::BadLexicon: return "BadLexicon";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::UnknownModule: return "UnknownModule";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace shortcheck
