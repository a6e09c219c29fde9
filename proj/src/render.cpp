#include "wavecoh/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "wavecoh/error.hpp"

namespace wavecoh::render {

namespace {

struct Stop {
    double t;
    Rgb color;
};

constexpr std::array<Stop, 6> heat_stops{{
    {0.0, {0, 0, 128}},
    {0.2, {0, 0, 255}},
    {0.4, {0, 255, 255}},
    {0.6, {255, 255, 0}},
    {0.8, {255, 0, 0}},
    {1.0, {128, 0, 0}},
}};

constexpr std::array<Stop, 5> diverging_stops{{
    {0.0, {5, 48, 97}},
    {0.25, {67, 147, 195}},
    {0.5, {255, 255, 255}},
    {0.75, {214, 96, 77}},
    {1.0, {103, 0, 31}},
}};

template <std::size_t N>
Rgb interpolate(const std::array<Stop, N>& stops, double t) {
    t = std::clamp(t, 0.0, 1.0);
    for (std::size_t k = 1; k < N; ++k) {
        if (t <= stops[k].t) {
            const double u = (t - stops[k - 1].t) / (stops[k].t - stops[k - 1].t);
            auto mix = [u](std::uint8_t a, std::uint8_t b) {
                return static_cast<std::uint8_t>(std::lround(a + u * (static_cast<double>(b) - a)));
            };
            return {mix(stops[k - 1].color.r, stops[k].color.r), mix(stops[k - 1].color.g, stops[k].color.g),
                    mix(stops[k - 1].color.b, stops[k].color.b)};
        }
    }
    return stops[N - 1].color;
}

std::pair<double, double> data_range(const RealGrid& grid, Colormap map) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < grid.rows(); ++j) {
        for (Eigen::Index i = 0; i < grid.cols(); ++i) {
            const double v = grid(j, i);
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (map == Colormap::diverging_phase) {
        const double m = std::max(std::abs(lo), std::abs(hi));
        return {-m, m};
    }
    return {lo, hi};
}

}  // namespace

void RenderSpec::validate() const {
    if (width < 16 || height < 16) {
        throw Error(Errc::InvalidArgument, "images must be at least 16x16 pixels");
    }
    if (value_range && !(value_range->first < value_range->second)) {
        throw Error(Errc::DegenerateRange, "value range lower bound must be below the upper bound");
    }
}

Rgb colormap_lookup(Colormap map, double t) {
    switch (map) {
        case Colormap::gray: {
            const auto g = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
            return {g, g, g};
        }
        case Colormap::linear_heat: return interpolate(heat_stops, t);
        case Colormap::diverging_phase: return interpolate(diverging_stops, t);
    }
    return {};
}

std::vector<std::uint8_t> render_pixmap(const RealGrid& grid, const RenderSpec& spec, std::span<const double> periods,
                                        std::span<const double> coi, const MaskGrid* mask) {
    spec.validate();
    const auto nrows = grid.rows();
    const auto ncols = grid.cols();
    if (nrows == 0 || ncols == 0) throw Error(Errc::DimensionMismatch, "cannot render an empty grid");
    const bool shade = spec.coi_shading && !periods.empty() && !coi.empty();
    if (shade && (static_cast<Eigen::Index>(periods.size()) != nrows ||
                  static_cast<Eigen::Index>(coi.size()) != ncols)) {
        throw Error(Errc::DimensionMismatch, "period/coi axes do not match the grid");
    }
    if (mask && (mask->rows() != nrows || mask->cols() != ncols)) {
        throw Error(Errc::DimensionMismatch, "mask does not match the grid");
    }

    const auto [lo, hi] = spec.value_range ? *spec.value_range : data_range(grid, spec.colormap);
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(Errc::DegenerateRange, "value range collapses to a single value");
    }

    const int w = spec.width;
    const int h = spec.height;
    auto cell_row = [&](int py) { return nrows - 1 - static_cast<Eigen::Index>(static_cast<long long>(py) * nrows / h); };
    auto cell_col = [&](int px) { return static_cast<Eigen::Index>(static_cast<long long>(px) * ncols / w); };
    auto masked = [&](int px, int py) {
        if (px < 0 || py < 0 || px >= w || py >= h) return false;
        return (*mask)(cell_row(py), cell_col(px));
    };
    const bool outline = spec.significance_contour && mask != nullptr;

    const int channels = spec.colormap == Colormap::gray ? 1 : 3;
    std::ostringstream header;
    header << (channels == 1 ? "P5" : "P6") << "\n" << w << " " << h << "\n255\n";
    const std::string head = header.str();
    std::vector<std::uint8_t> out(head.begin(), head.end());
    out.reserve(out.size() + static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels);

    for (int py = 0; py < h; ++py) {
        const Eigen::Index j = cell_row(py);
        for (int px = 0; px < w; ++px) {
            const Eigen::Index i = cell_col(px);
            const double v = grid(j, i);
            Rgb c;
            if (!std::isfinite(v)) {
                c = undefined_color;
            } else {
                c = colormap_lookup(spec.colormap, (v - lo) / (hi - lo));
                if (shade && periods[static_cast<std::size_t>(j)] >= coi[static_cast<std::size_t>(i)]) {
                    c = {static_cast<std::uint8_t>(c.r / 2), static_cast<std::uint8_t>(c.g / 2),
                         static_cast<std::uint8_t>(c.b / 2)};
                }
            }
            if (outline && masked(px, py) &&
                (!masked(px - 1, py) || !masked(px + 1, py) || !masked(px, py - 1) || !masked(px, py + 1))) {
                c = {0, 0, 0};
            }
            if (channels == 1) {
                out.push_back(c.r);
            } else {
                out.push_back(c.r);
                out.push_back(c.g);
                out.push_back(c.b);
            }
        }
    }
    return out;
}

Image decode_pixmap(std::span<const std::uint8_t> bytes) {
    std::string text(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(bytes.size(), 64)));
    std::istringstream in(text);
    std::string magic;
    int maxval = 0;
    Image img;
    in >> magic >> img.width >> img.height >> maxval;
    if (!in || (magic != "P5" && magic != "P6") || maxval != 255) {
        throw Error(Errc::InvalidArgument, "not a binary 8-bit PGM/PPM");
    }
    img.channels = magic == "P5" ? 1 : 3;
    const auto offset = static_cast<std::size_t>(in.tellg()) + 1;  // single whitespace after maxval
    const std::size_t expected = static_cast<std::size_t>(img.width) * img.height * img.channels;
    if (bytes.size() != offset + expected) throw Error(Errc::InvalidArgument, "pixmap payload size mismatch");
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
    return img;
}

}  // namespace wavecoh::render
