#include "wavecoh/cwt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavecoh/error.hpp"
#include "wavecoh/fft.hpp"

namespace wavecoh::cwt {

namespace {

constexpr double pi = std::numbers::pi;
const double fwhm_per_sigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

// Fourier transform of the unit-energy mother at angular frequency xi.
double unit_mother_spectrum(double xi, const MorletParams& params) {
    const double sigma = params.sigma_t();
    return std::sqrt(2.0 * sigma) * std::pow(pi, 0.25) * morlet_freq(xi, 1.0, params);
}

}  // namespace

MorletParams MorletParams::from_omega0(double omega0) {
    return MorletParams{omega0 / (2.0 * pi), fwhm_per_sigma};
}

double MorletParams::sigma_t() const noexcept { return fwhm / fwhm_per_sigma; }

double MorletParams::omega0() const noexcept { return 2.0 * pi * center_frequency * sigma_t(); }

void MorletParams::validate() const {
    if (!(center_frequency > 0.0) || !(fwhm > 0.0)) {
        throw Error(Errc::InvalidArgument, "Morlet f0 and FWHM must be positive");
    }
    if (omega0() < 5.0) {
        throw Error(Errc::InvalidArgument,
                    "Morlet omega0 = " + std::to_string(omega0()) + " is below 5; the wavelet is not zero-mean");
    }
}

double fourier_factor(const MorletParams& params) {
    const double w0 = params.omega0();
    return params.sigma_t() * 4.0 * pi / (w0 + std::sqrt(2.0 + w0 * w0));
}

double scale_to_period(double scale, const MorletParams& params) { return scale * fourier_factor(params); }

double coi_constant(const MorletParams& params) {
    return std::sqrt(2.0) * params.sigma_t() / fourier_factor(params);
}

std::vector<double> ScaleGrid::periods() const {
    std::vector<double> out(scales.size());
    std::transform(scales.begin(), scales.end(), out.begin(), [this](double s) { return s * fourier_factor; });
    return out;
}

void ScaleGrid::validate_for(double dt) const {
    if (s0 < 2.0 * dt * (1.0 - 1e-12)) {
        throw Error(Errc::ScaleBelowNyquist,
                    "smallest scale " + std::to_string(s0) + " is below 2*dt = " + std::to_string(2.0 * dt));
    }
}

ScaleGrid make_scale_grid(double s0, std::size_t voices_per_octave, std::size_t octaves, const MorletParams& params) {
    if (!(s0 > 0.0)) throw Error(Errc::InvalidArgument, "smallest scale must be positive");
    if (voices_per_octave < 1) throw Error(Errc::InvalidArgument, "need at least one voice per octave");
    ScaleGrid grid;
    grid.s0 = s0;
    grid.voices_per_octave = voices_per_octave;
    grid.num_scales = octaves * voices_per_octave + 1;
    grid.fourier_factor = fourier_factor(params);
    grid.scales.resize(grid.num_scales);
    for (std::size_t j = 0; j < grid.num_scales; ++j) {
        grid.scales[j] = s0 * std::exp2(static_cast<double>(j) / static_cast<double>(voices_per_octave));
    }
    return grid;
}

ScaleGrid default_scale_grid(double dt, const MorletParams& params) {
    return make_scale_grid(2.0 * dt, 12, 8, params);
}

std::vector<double> WaveletSpectrum::times() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t0 + static_cast<double>(i) * dt;
    return out;
}

std::complex<double> morlet_time(double t, const MorletParams& params) {
    const double envelope = std::exp(-4.0 * std::numbers::ln2 * t * t / (params.fwhm * params.fwhm));
    return std::polar(envelope, 2.0 * pi * params.center_frequency * t);
}

double morlet_freq(double omega, double scale, const MorletParams& params) {
    const double x = params.sigma_t() * scale * omega - params.omega0();
    return std::exp(-0.5 * x * x);
}

std::size_t padded_length(std::size_t n, Padding padding) {
    if (padding == Padding::none) return n;
    const auto exponent = static_cast<int>(std::floor(std::log2(static_cast<double>(n)) + 0.4999));
    return std::size_t{1} << (exponent + 1);
}

std::vector<double> coi(std::size_t n, double dt, const MorletParams& params) {
    const double slope = coi_constant(params);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<double>(std::min(i, n - 1 - i)) * dt / slope;
    }
    return out;
}

WaveletSpectrum transform(const TimeSeries& series, const ScaleGrid& grid, const MorletParams& params,
                          Padding padding) {
    params.validate();
    const std::size_t n = series.size();
    if (n < 4) throw Error(Errc::SeriesTooShort, "wavelet transform needs at least 4 samples");
    grid.validate_for(series.dt());

    const double dt = series.dt();
    const std::size_t m = padded_length(n, padding);
    std::vector<fft::cplx> spectrum(m, 0.0);
    std::copy(series.values().begin(), series.values().end(), spectrum.begin());
    fft::forward(spectrum);
    const auto omega = fft::angular_frequencies(m, dt);

    WaveletSpectrum out;
    out.grid = grid;
    out.t0 = series.t0();
    out.dt = dt;
    out.params = params;
    out.coeffs.resize(static_cast<Eigen::Index>(grid.num_scales), static_cast<Eigen::Index>(n));
    out.coi = coi(n, dt, params);

    const double sigma = params.sigma_t();
    std::vector<fft::cplx> work(m);
    for (std::size_t j = 0; j < grid.num_scales; ++j) {
        const double a = grid.scales[j];
        // sqrt(a/dt) times the unit-energy mother spectrum at a*omega, and the 1/m of the inverse DFT.
        const double gain = std::sqrt(2.0 * sigma * a / dt) * std::pow(pi, 0.25) / static_cast<double>(m);
        for (std::size_t k = 0; k < m; ++k) {
            work[k] = spectrum[k] * (gain * morlet_freq(omega[k], a, params));
        }
        fft::inverse(work);
        auto row = out.coeffs.row(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < n; ++i) row(static_cast<Eigen::Index>(i)) = work[i];
    }
    return out;
}

RealGrid power(const WaveletSpectrum& spec) { return spec.coeffs.abs2(); }

double admissibility_constant(const MorletParams& params) {
    // Substituting xi = exp(u) turns the integrand into |Psi(e^u)|^2 du, which is
    // smooth; composite Simpson over a range that holds the Gaussian's support.
    const double sigma = params.sigma_t();
    const double lo = std::log(1e-8 / sigma);
    const double hi = std::log((params.omega0() + 14.0) / sigma);
    const int steps = 40000;
    const double h = (hi - lo) / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double xi = std::exp(lo + h * i);
        const double psi = unit_mother_spectrum(xi, params);
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * psi * psi;
    }
    return sum * h / 3.0;
}

TimeSeries reconstruct(const WaveletSpectrum& spec) {
    if (spec.grid.voices_per_octave < 8) {
        throw Error(Errc::GridTooSparse, "reconstruction needs at least 8 voices per octave, grid has " +
                                             std::to_string(spec.grid.voices_per_octave));
    }
    const std::size_t n = spec.size();
    const double dt = spec.dt;
    const std::size_t m = padded_length(n, Padding::next_pow2);
    const auto omega = fft::angular_frequencies(m, dt);
    const double dj = 1.0 / static_cast<double>(spec.grid.voices_per_octave);
    const double c_psi = admissibility_constant(spec.params);

    // s(t) = (2/C) Re sum_j (ln2 dj / a_j) sum_b sqrt(dt) W(a_j, b) a_j^{-1/2} psi_u((t - b)/a_j) dt;
    // the inner sum over b is a convolution evaluated with the closed-form spectrum.
    std::vector<double> acc(n, 0.0);
    std::vector<fft::cplx> work(m);
    for (std::size_t j = 0; j < spec.grid.num_scales; ++j) {
        const double a = spec.grid.scales[j];
        std::fill(work.begin(), work.end(), fft::cplx{});
        const auto row = spec.coeffs.row(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < n; ++i) work[i] = row(static_cast<Eigen::Index>(i));
        fft::forward(work);
        for (std::size_t k = 0; k < m; ++k) work[k] *= unit_mother_spectrum(a * omega[k], spec.params);
        fft::inverse(work);
        const double w = 1.0 / (std::sqrt(a) * static_cast<double>(m));
        for (std::size_t i = 0; i < n; ++i) acc[i] += w * work[i].real();
    }
    const double factor = 2.0 * std::numbers::ln2 * dj * std::sqrt(dt) / c_psi;
    for (double& v : acc) v *= factor;
    return TimeSeries(spec.t0, dt, std::move(acc), "reconstruction");
}

}  // namespace wavecoh::cwt
