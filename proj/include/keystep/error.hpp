#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace keystep {

enum class ErrorCode {
    Format,
    EmptyData,
    Bounds,
    InvalidCode,
    Constraint,
    NotFound,
    Io,
};

const char* to_string(ErrorCode code);

/// Base of all engine errors. `fields` names the offending inputs, when known.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::vector<std::string> fields = {})
        : std::runtime_error(message), code_(code), fields_(std::move(fields)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::vector<std::string>& fields() const noexcept { return fields_; }

private:
    ErrorCode code_;
    std::vector<std::string> fields_;
};

#define KEYSTEP_DEFINE_ERROR(Name, Code)                                                   \
    class Name : public Error {                                                            \
    public:                                                                                \
        explicit Name(const std::string& message, std::vector<std::string> fields = {})    \
            : Error(ErrorCode::Code, message, std::move(fields)) {}                        \
    }

KEYSTEP_DEFINE_ERROR(FormatError, Format);
KEYSTEP_DEFINE_ERROR(EmptyDataError, EmptyData);
KEYSTEP_DEFINE_ERROR(BoundsError, Bounds);
KEYSTEP_DEFINE_ERROR(InvalidCodeError, InvalidCode);
KEYSTEP_DEFINE_ERROR(ConstraintError, Constraint);
KEYSTEP_DEFINE_ERROR(NotFoundError, NotFound);
KEYSTEP_DEFINE_ERROR(IoError, Io);

#undef KEYSTEP_DEFINE_ERROR

}  // namespace keystep
