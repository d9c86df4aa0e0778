#include "netfx/error.hpp"

namespace netfx {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::UnreadableSource: return "UnreadableSource";
        case Errc::SchemaViolation: return "SchemaViolation";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::MissingCohort: return "MissingCohort";
        case Errc::EmptyWindow: return "EmptyWindow";
        case Errc::SeriesTooShort: return "SeriesTooShort";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::TooShort: return "TooShort";
        case Errc::AlphabetTooLarge: return "AlphabetTooLarge";
        case Errc::MissingDriver: return "MissingDriver";
        case Errc::AllZero: return "AllZero";
        case Errc::EmptyCurve: return "EmptyCurve";
        case Errc::NoSubmissions: return "NoSubmissions";
        case Errc::MonthOutOfRange: return "MonthOutOfRange";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

}  // namespace netfx
