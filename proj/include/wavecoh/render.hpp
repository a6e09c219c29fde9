#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wavecoh/grid.hpp"

namespace wavecoh::render {

enum class Colormap {
    gray,             // single channel, written as binary PGM (P5)
    linear_heat,      // dark blue -> cyan -> yellow -> dark red, binary PPM (P6)
    diverging_phase,  // blue -> white -> red with white at the range midpoint, binary PPM
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct RenderSpec {
    Colormap colormap = Colormap::linear_heat;
    int width = 512;
    int height = 256;
    bool coi_shading = true;
    bool significance_contour = true;
    std::optional<std::pair<double, double>> value_range;

    /// Throws InvalidArgument for images below 16x16 or an inverted range.
    void validate() const;
};

/// Colormap lookup for t in [0, 1].
Rgb colormap_lookup(Colormap map, double t);

inline constexpr Rgb undefined_color{128, 128, 128};

/// Renders a scale-major grid (row j = scale j, shortest period first) with
/// the longest period in image row 0. Cells whose period is at or above the
/// cone of influence are darkened by half; the mask outline is drawn black;
/// NaN cells are mid-gray. Empty `periods`/`coi` disable shading.
///
/// Without an explicit value range the data min/max is used (symmetric about
/// zero for the diverging map); a collapsed range throws DegenerateRange.
std::vector<std::uint8_t> render_pixmap(const RealGrid& grid, const RenderSpec& spec, std::span<const double> periods,
                                        std::span<const double> coi, const MaskGrid* mask = nullptr);

struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;
};

/// Parses a binary P5/P6 pixmap with maxval 255.
Image decode_pixmap(std::span<const std::uint8_t> bytes);

}  // namespace wavecoh::render
