#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hisqa {

enum class ErrorCode {
    Precondition,
    DegenerateDirection,
    DegeneratePose,
    Schema,
    MissingObject,
    UnknownActivity,
    ShapeMismatch,
    DimensionMismatch,
    OutOfRange,
    UnknownSubtask,
    NotGeneratable,
    Parse,
    JudgeFormat,
    UndefinedCorrelation,
    Llm,
    Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. `detail` carries the offending
// payload (raw LLM text, object id, path) when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace hisqa
