#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wavecoh {

enum class Errc {
    // series
    NonPositiveStep,
    EmptySeries,
    NonFiniteValue,
    TooShort,
    NoOverlap,
    IncompatibleGrid,
    ZeroVariance,
    LengthMismatch,
    // pfa
    Underdetermined,
    SingularNormalMatrix,
    BandOutOfRange,
    InvalidArgument,
    // cwt
    ScaleBelowNyquist,
    SeriesTooShort,
    GridTooSparse,
    // coherence / significance
    GridMismatch,
    DimensionMismatch,
    InsufficientSurrogates,
    // ingest
    FileUnreadable,
    MalformedRow,
    MissingValue,
    NonUniformStep,
    EmptyAfterParse,
    HeaderOnlyFile,
    SpanMismatch,
    // render
    DegenerateRange,
};

std::string_view errc_name(Errc code) noexcept;

/// Single exception type for the library. `detail` carries the offending
/// sample index (NonFiniteValue) or the 1-based line number (ingest errors).
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<std::size_t> detail = std::nullopt);

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::optional<std::size_t> detail_;
};

}  // namespace wavecoh
