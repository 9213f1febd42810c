#include "hisqa/error.hpp"

namespace hisqa {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Precondition: return "precondition";
        case ErrorCode::DegenerateDirection: return "degenerate_direction";
        case ErrorCode::DegeneratePose: return "degenerate_pose";
        case ErrorCode::Schema: return "schema";
        case ErrorCode::MissingObject: return "missing_object";
        case ErrorCode::UnknownActivity: return "unknown_activity";
        case ErrorCode::ShapeMismatch: return "shape_mismatch";
        case ErrorCode::DimensionMismatch: return "dimension_mismatch";
        case ErrorCode::OutOfRange: return "out_of_range";
        case ErrorCode::UnknownSubtask: return "unknown_subtask";
        case ErrorCode::NotGeneratable: return "not_generatable";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::JudgeFormat: return "judge_format";
        case ErrorCode::UndefinedCorrelation: return "undefined_correlation";
        case ErrorCode::Llm: return "llm";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

}  // namespace hisqa
