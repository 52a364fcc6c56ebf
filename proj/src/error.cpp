#include "csgesture/error.hpp"

namespace csg {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InsufficientFrames: return "InsufficientFrames";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::BlockSizeError: return "BlockSizeError";
        case ErrorCode::EmptyMatrix: return "EmptyMatrix";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::RankDeficiency: return "RankDeficiency";
        case ErrorCode::EmptySequence: return "EmptySequence";
        case ErrorCode::LengthError: return "LengthError";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::VersionError: return "VersionError";
        case ErrorCode::StreamError: return "StreamError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace csg
