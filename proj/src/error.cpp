#include "keystep/error.hpp"

namespace keystep {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Format: return "format_error";
        case ErrorCode::EmptyData: return "empty_data";
        case ErrorCode::Bounds: return "bounds_error";
        case ErrorCode::InvalidCode: return "invalid_code";
        case ErrorCode::Constraint: return "constraint_error";
        case ErrorCode::NotFound: return "not_found";
        case ErrorCode::Io: return "io_error";
    }
    return "error";
}

}  // namespace keystep
