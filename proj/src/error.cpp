#include <dscsim/error.hpp>

namespace dscsim {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ChannelAlignment: return "ChannelAlignment";
        case ErrorCode::BadStride: return "BadStride";
        case ErrorCode::EmptyDims: return "EmptyDims";
        case ErrorCode::ChannelLimit: return "ChannelLimit";
        case ErrorCode::BadQuantParams: return "BadQuantParams";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::TruncatedStream: return "TruncatedStream";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::BadChannel: return "BadChannel";
        case ErrorCode::BadIndex: return "BadIndex";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::BadLatency: return "BadLatency";
    }
    return "Unknown";
}

}  // namespace dscsim
