#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xray {

enum class ErrorCode {
    usage,
    shape,
    missing_file,
    unsupported_format,
    corrupt_image,
    empty_class,
    single_class,
    too_few_samples,
    spec_mismatch,
    diverged,
    io,
    corrupt_checkpoint,
};

/// Short stable identifier used in the `error[<code>]:` prefix of CLI messages.
constexpr std::string_view code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::usage: return "usage";
    case ErrorCode::shape: return "shape";
    case ErrorCode::missing_file: return "missing_file";
    case ErrorCode::unsupported_format: return "unsupported_format";
    case ErrorCode::corrupt_image: return "corrupt_image";
    case ErrorCode::empty_class: return "empty_class";
    case ErrorCode::single_class: return "single_class";
    case ErrorCode::too_few_samples: return "too_few_samples";
    case ErrorCode::spec_mismatch: return "spec_mismatch";
    case ErrorCode::diverged: return "diverged";
    case ErrorCode::io: return "io";
    case ErrorCode::corrupt_checkpoint: return "corrupt_checkpoint";
    }
    return "unknown";
}

/// Process exit status for each error code: 2 usage, 3 data, 4 divergence, 5 I/O or corruption.
constexpr int exit_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::usage: return 2;
    case ErrorCode::diverged: return 4;
    case ErrorCode::io:
    case ErrorCode::corrupt_checkpoint: return 5;
    default: return 3;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace xray
