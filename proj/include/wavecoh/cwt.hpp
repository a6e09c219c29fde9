#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "wavecoh/grid.hpp"
#include "wavecoh/series.hpp"

namespace wavecoh::cwt {

/// Morlet mother wavelet psi(t) = exp(i 2 pi f0 t) exp(-4 ln2 t^2 / h^2).
///
/// `center_frequency` is f0 in cycles per unit time and `fwhm` is the
/// full-width at half-maximum h of the Gaussian envelope. The envelope
/// standard deviation is sigma_t = h / (2 sqrt(2 ln 2)) and the
/// nondimensional centre frequency is omega0 = 2 pi f0 sigma_t.
struct MorletParams {
    double center_frequency = 0.0;
    double fwhm = 0.0;

    /// omega0 convention with sigma_t = 1, so that scale is measured in the
    /// same units as the envelope width. omega0 = 6 is the library default.
    static MorletParams from_omega0(double omega0 = 6.0);

    double sigma_t() const noexcept;
    double omega0() const noexcept;

    /// Throws InvalidArgument unless f0 > 0, h > 0 and omega0 >= 5.
    void validate() const;
};

/// period = fourier_factor * scale.
double fourier_factor(const MorletParams& params);
double scale_to_period(double scale, const MorletParams& params);

/// e-folding time of |psi| at scale a is sqrt(2) sigma_t a; divided by the
/// period at that scale this gives the cone-of-influence slope (~1.37 for omega0 = 6).
double coi_constant(const MorletParams& params);

/// Logarithmic scales s_j = s0 * 2^(j / voices_per_octave), j = 0..num_scales-1.
struct ScaleGrid {
    double s0 = 0.0;
    std::size_t voices_per_octave = 0;
    std::size_t num_scales = 0;
    std::vector<double> scales;
    double fourier_factor = 0.0;

    std::vector<double> periods() const;

    /// Throws ScaleBelowNyquist when s0 < 2 dt.
    void validate_for(double dt) const;
};

/// num_scales = octaves * voices + 1.
ScaleGrid make_scale_grid(double s0, std::size_t voices_per_octave, std::size_t octaves, const MorletParams& params);

/// Default grid for annual data: s0 = 2 dt, 12 voices, 8 octaves (97 scales).
ScaleGrid default_scale_grid(double dt, const MorletParams& params);

enum class Padding {
    next_pow2,  // zero pad to 2^(round(log2 N) + 1); pad region discarded
    none,       // circular transform over the N samples
};

struct WaveletSpectrum {
    ScaleGrid grid;
    double t0 = 0.0;
    double dt = 1.0;
    ComplexGrid coeffs;       // num_scales x N
    std::vector<double> coi;  // per time: longest trustworthy period
    MorletParams params;

    std::size_t size() const noexcept { return static_cast<std::size_t>(coeffs.cols()); }
    std::vector<double> times() const;
};

std::complex<double> morlet_time(double t, const MorletParams& params);

/// Frequency response of the daughter wavelet at `scale`, unit peak gain:
/// exp(-(sigma_t * scale * omega - omega0)^2 / 2). Its maximum sits at
/// omega = 2 pi f0 / scale.
double morlet_freq(double omega, double scale, const MorletParams& params);

/// Continuous wavelet transform via FFT.
///
/// coeffs(j, i) = sqrt(dt / a_j) * sum_n x_n conj(psi_u((t_n - b_i) / a_j)),
/// with psi_u the unit-energy Morlet. Equivalently (1/sqrt(a)) times the
/// continuous inner product, scaled by 1/sqrt(dt) so that white noise of
/// variance v has expected power v at every scale.
WaveletSpectrum transform(const TimeSeries& series, const ScaleGrid& grid, const MorletParams& params,
                          Padding padding = Padding::next_pow2);

RealGrid power(const WaveletSpectrum& spec);

/// Cone of influence, zero at both ends and rising linearly to the middle.
std::vector<double> coi(std::size_t n, double dt, const MorletParams& params);

/// Admissibility constant, integral over omega > 0 of |Psi_u(omega)|^2 / omega.
double admissibility_constant(const MorletParams& params);

/// Inverse transform by discretized double sum over scales and translations.
/// Throws GridTooSparse below 8 voices per octave.
TimeSeries reconstruct(const WaveletSpectrum& spec);

std::size_t padded_length(std::size_t n, Padding padding);

}  // namespace wavecoh::cwt
