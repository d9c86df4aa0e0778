#pragma once

#include <stdexcept>
#include <string>

namespace netfx {

enum class Errc {
    UnreadableSource,
    SchemaViolation,
    EmptyInput,
    MissingCohort,
    EmptyWindow,
    SeriesTooShort,
    LengthMismatch,
    TooShort,
    AlphabetTooLarge,
    MissingDriver,
    AllZero,
    EmptyCurve,
    NoSubmissions,
    MonthOutOfRange,
    InvalidSpec,
    InvalidArgument,
};

const char* errc_name(Errc code);

/// Single exception type for all module errors; the CLI maps these to
/// exit code 1 and configuration problems to exit code 2.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace netfx
