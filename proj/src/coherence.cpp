#include "wavecoh/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wavecoh/error.hpp"
#include "wavecoh/fft.hpp"

namespace wavecoh::coherence {

namespace {

constexpr double tiny_power = 1e-300;

}  // namespace

SmoothingSpec SmoothingSpec::defaults(std::size_t voices_per_octave) {
    const double voices = 0.6 * static_cast<double>(voices_per_octave) / std::log10(2.0);
    // nearest odd integer
    auto window = static_cast<std::size_t>(2.0 * std::floor(voices / 2.0) + 1.0);
    if (std::abs(static_cast<double>(window + 2) - voices) < std::abs(static_cast<double>(window) - voices)) {
        window += 2;
    }
    SmoothingSpec spec;
    spec.scale_window = std::max<std::size_t>(window, 1);
    return spec;
}

SmoothingSpec SmoothingSpec::none() {
    SmoothingSpec spec;
    spec.time_kernel = TimeKernel::delta;
    spec.scale_window = 1;
    return spec;
}

void check_compatible(const cwt::WaveletSpectrum& wx, const cwt::WaveletSpectrum& wy) {
    const bool same_shape = wx.coeffs.rows() == wy.coeffs.rows() && wx.coeffs.cols() == wy.coeffs.cols();
    const bool same_axis = std::abs(wx.dt - wy.dt) <= 1e-12 * wx.dt && std::abs(wx.t0 - wy.t0) <= 1e-9 * wx.dt;
    bool same_scales = wx.grid.scales.size() == wy.grid.scales.size();
    for (std::size_t j = 0; same_scales && j < wx.grid.scales.size(); ++j) {
        same_scales = std::abs(wx.grid.scales[j] - wy.grid.scales[j]) <= 1e-12 * wx.grid.scales[j];
    }
    if (!same_shape || !same_axis || !same_scales) {
        throw Error(Errc::GridMismatch, "wavelet spectra do not share scale grid and time axis");
    }
}

CrossSpectrum cross_spectrum(const cwt::WaveletSpectrum& wx, const cwt::WaveletSpectrum& wy) {
    check_compatible(wx, wy);
    return CrossSpectrum{wx.grid, wx.t0, wx.dt, wx.coeffs * wy.coeffs.conjugate()};
}

Smoother::Smoother(const cwt::ScaleGrid& grid, std::size_t length, double dt, const cwt::MorletParams& params,
                   const SmoothingSpec& spec)
    : length_(length), spec_(spec), rows_(grid.num_scales) {
    if (spec.scale_window < 1 || spec.scale_window % 2 == 0) {
        throw Error(Errc::InvalidArgument, "scale window must be a positive odd number of voices");
    }
    if (spec.time_kernel == TimeKernel::delta) {
        for (auto& row : rows_) row.taps = {1.0};
        return;
    }
    const double sigma = params.sigma_t();
    for (std::size_t j = 0; j < grid.num_scales; ++j) {
        const double a = grid.scales[j];
        const double support = spec.truncation_efolds * std::sqrt(2.0) * sigma * a / dt;
        const auto half = static_cast<std::ptrdiff_t>(
            std::min<double>(std::floor(support), static_cast<double>(length - 1)));
        Row& row = rows_[j];
        row.taps.resize(static_cast<std::size_t>(2 * half + 1));
        double total = 0.0;
        for (std::ptrdiff_t d = -half; d <= half; ++d) {
            const double t = static_cast<double>(d) * dt / (sigma * a);
            const double w = std::exp(-0.5 * t * t);
            row.taps[static_cast<std::size_t>(d + half)] = w;
            total += w;
        }
        for (double& w : row.taps) w /= total;

        const std::size_t m = fft::next_pow2(length + static_cast<std::size_t>(half));
        row.shape.assign(m, 0.0);
        for (std::ptrdiff_t d = -half; d <= half; ++d) {
            const auto slot = static_cast<std::size_t>((d + static_cast<std::ptrdiff_t>(m)) % static_cast<std::ptrdiff_t>(m));
            row.shape[slot] = row.taps[static_cast<std::size_t>(d + half)];
        }
        fft::forward(row.shape);
        for (auto& c : row.shape) c /= static_cast<double>(m);

        // Weight of taps with d in [i - length + 1, i], via prefix sums.
        std::vector<double> prefix(row.taps.size() + 1, 0.0);
        for (std::size_t k = 0; k < row.taps.size(); ++k) prefix[k + 1] = prefix[k] + row.taps[k];
        row.overlap.resize(length);
        const auto n = static_cast<std::ptrdiff_t>(length);
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const std::ptrdiff_t lo = std::max(-half, i - n + 1) + half;
            const std::ptrdiff_t hi = std::min(half, i) + half;
            row.overlap[static_cast<std::size_t>(i)] =
                prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)];
        }
    }
}

void Smoother::check_dimensions(const ComplexGrid& field) const {
    if (static_cast<std::size_t>(field.rows()) != rows_.size() || static_cast<std::size_t>(field.cols()) != length_) {
        throw Error(Errc::DimensionMismatch, "field is " + std::to_string(field.rows()) + "x" +
                                                 std::to_string(field.cols()) + ", smoother expects " +
                                                 std::to_string(rows_.size()) + "x" + std::to_string(length_));
    }
}

void Smoother::smooth_time(ComplexGrid& field) const {
    check_dimensions(field);
    if (spec_.time_kernel == TimeKernel::delta) return;
    std::vector<fft::cplx> work;
    for (std::size_t j = 0; j < rows_.size(); ++j) {
        const Row& row = rows_[j];
        work.assign(row.shape.size(), 0.0);
        auto r = field.row(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < length_; ++i) work[i] = r(static_cast<Eigen::Index>(i));
        fft::forward(work);
        for (std::size_t k = 0; k < work.size(); ++k) work[k] *= row.shape[k];
        fft::inverse(work);
        for (std::size_t i = 0; i < length_; ++i) r(static_cast<Eigen::Index>(i)) = work[i] / row.overlap[i];
    }
}

void Smoother::smooth_scale(ComplexGrid& field) const {
    check_dimensions(field);
    const auto half = static_cast<Eigen::Index>(spec_.scale_window / 2);
    if (half == 0) return;
    const Eigen::Index nrows = field.rows();
    const ComplexGrid source = field;
    for (Eigen::Index j = 0; j < nrows; ++j) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, j - half);
        const Eigen::Index hi = std::min<Eigen::Index>(nrows - 1, j + half);
        field.row(j) = source.middleRows(lo, hi - lo + 1).colwise().sum() / static_cast<double>(hi - lo + 1);
    }
}

void Smoother::apply(ComplexGrid& field) const {
    smooth_time(field);
    smooth_scale(field);
}

ComplexGrid smooth(const ComplexGrid& field, const cwt::ScaleGrid& grid, double dt, const cwt::MorletParams& params,
                   const SmoothingSpec& spec) {
    const Smoother smoother(grid, static_cast<std::size_t>(field.cols()), dt, params, spec);
    ComplexGrid out = field;
    smoother.apply(out);
    return out;
}

PhaseResult phase(const ComplexGrid& smoothed_cross) {
    PhaseResult out;
    out.angle.resize(smoothed_cross.rows(), smoothed_cross.cols());
    out.defined.resize(smoothed_cross.rows(), smoothed_cross.cols());
    for (Eigen::Index j = 0; j < smoothed_cross.rows(); ++j) {
        for (Eigen::Index i = 0; i < smoothed_cross.cols(); ++i) {
            const auto z = smoothed_cross(j, i);
            if (z == std::complex<double>{}) {
                out.angle(j, i) = 0.0;
                out.defined(j, i) = false;
                continue;
            }
            double angle = std::atan2(z.imag(), z.real());
            if (angle <= -std::numbers::pi) angle = std::numbers::pi;
            out.angle(j, i) = angle;
            out.defined(j, i) = true;
        }
    }
    return out;
}

std::vector<double> CoherenceResult::times() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t0 + static_cast<double>(i) * dt;
    return out;
}

CoherenceResult coherence(const cwt::WaveletSpectrum& wx, const cwt::WaveletSpectrum& wy, const Smoother& smoother) {
    check_compatible(wx, wy);
    const Eigen::Index nrows = wx.coeffs.rows();
    const Eigen::Index ncols = wx.coeffs.cols();

    // Energy densities: divide every row by its scale.
    // The two powers are smoothed separately: packing them into one complex field
    // would leak rounding noise from one into the other and mask a vanishing power.
    ComplexGrid cross(nrows, ncols);
    ComplexGrid power_x(nrows, ncols);
    ComplexGrid power_y(nrows, ncols);
    for (Eigen::Index j = 0; j < nrows; ++j) {
        const double inv_scale = 1.0 / wx.grid.scales[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < ncols; ++i) {
            const auto x = wx.coeffs(j, i);
            const auto y = wy.coeffs(j, i);
            cross(j, i) = x * std::conj(y) * inv_scale;
            power_x(j, i) = std::norm(x) * inv_scale;
            power_y(j, i) = std::norm(y) * inv_scale;
        }
    }
    smoother.apply(cross);
    smoother.apply(power_x);
    smoother.apply(power_y);

    CoherenceResult out;
    out.grid = wx.grid;
    out.t0 = wx.t0;
    out.dt = wx.dt;
    out.coi = wx.coi;
    out.params = wx.params;
    out.smoothing = smoother.spec();
    out.r2.resize(nrows, ncols);
    out.defined.resize(nrows, ncols);

    const PhaseResult ph = phase(cross);
    out.phase = ph.angle;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index j = 0; j < nrows; ++j) {
        for (Eigen::Index i = 0; i < ncols; ++i) {
            const double px = power_x(j, i).real();
            const double py = power_y(j, i).real();
            if (!(px >= tiny_power) || !(py >= tiny_power)) {
                out.r2(j, i) = nan;
                out.phase(j, i) = nan;
                out.defined(j, i) = false;
                continue;
            }
            double r2 = std::norm(cross(j, i)) / (px * py);
            // Cauchy-Schwarz bounds r2 by 1 exactly; only rounding can exceed it.
            if (r2 > 1.0 && r2 - 1.0 < 1e-12) r2 = 1.0;
            out.r2(j, i) = r2;
            out.defined(j, i) = true;
        }
    }
    out.smoothed_cross = std::move(cross);
    return out;
}

CoherenceResult coherence(const cwt::WaveletSpectrum& wx, const cwt::WaveletSpectrum& wy, const SmoothingSpec& spec) {
    check_compatible(wx, wy);
    const Smoother smoother(wx.grid, wx.size(), wx.dt, wx.params, spec);
    return coherence(wx, wy, smoother);
}

}  // namespace wavecoh::coherence
