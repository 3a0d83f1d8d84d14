#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dscsim {

enum class ErrorCode {
    ChannelAlignment,
    BadStride,
    EmptyDims,
    ChannelLimit,
    BadQuantParams,
    OutOfBounds,
    BadMagic,
    TruncatedStream,
    VersionMismatch,
    ShapeMismatch,
    BadChannel,
    BadIndex,
    Overflow,
    ParseError,
    IoError,
    BadLatency,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-checkable code; what() holds the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace dscsim
