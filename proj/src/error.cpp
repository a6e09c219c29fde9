#include "wavecoh/error.hpp"

namespace wavecoh {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::NonPositiveStep: return "NonPositiveStep";
        case Errc::EmptySeries: return "EmptySeries";
        case Errc::NonFiniteValue: return "NonFiniteValue";
        case Errc::TooShort: return "TooShort";
        case Errc::NoOverlap: return "NoOverlap";
        case Errc::IncompatibleGrid: return "IncompatibleGrid";
        case Errc::ZeroVariance: return "ZeroVariance";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::Underdetermined: return "Underdetermined";
        case Errc::SingularNormalMatrix: return "SingularNormalMatrix";
        case Errc::BandOutOfRange: return "BandOutOfRange";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::ScaleBelowNyquist: return "ScaleBelowNyquist";
        case Errc::SeriesTooShort: return "SeriesTooShort";
        case Errc::GridTooSparse: return "GridTooSparse";
        case Errc::GridMismatch: return "GridMismatch";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::InsufficientSurrogates: return "InsufficientSurrogates";
        case Errc::FileUnreadable: return "FileUnreadable";
        case Errc::MalformedRow: return "MalformedRow";
        case Errc::MissingValue: return "MissingValue";
        case Errc::NonUniformStep: return "NonUniformStep";
        case Errc::EmptyAfterParse: return "EmptyAfterParse";
        case Errc::HeaderOnlyFile: return "HeaderOnlyFile";
        case Errc::SpanMismatch: return "SpanMismatch";
        case Errc::DegenerateRange: return "DegenerateRange";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& what, std::optional<std::size_t> detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), detail_(detail) {}

}  // namespace wavecoh
