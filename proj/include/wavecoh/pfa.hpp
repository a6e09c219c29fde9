#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "wavecoh/series.hpp"

namespace wavecoh::pfa {

/// Partial Fourier approximation
///
///   F(t) = f0 + f1 (t - t0) + sum_k a_k sin(2 pi k (t - t0) / P0)
///                           + sum_k b_k cos(2 pi k (t - t0) / P0),  k = 1..n
///
/// fitted by least squares. `sigma_*` are the standard LS errors of the
/// corresponding coefficients.
struct HarmonicPair {
    double a = 0.0;  // sine coefficient
    double b = 0.0;  // cosine coefficient
};

struct PfaModel {
    double base_period = 0.0;  // P0, years
    double mean_epoch = 0.0;   // t0, years
    double f0 = 0.0;
    double f1 = 0.0;
    double sigma_f0 = 0.0;
    double sigma_f1 = 0.0;
    std::vector<HarmonicPair> coeffs;  // coeffs[k-1] for harmonic k
    std::vector<HarmonicPair> sigma;   // LS standard errors, same layout
    double residual_rms = 0.0;
    std::size_t samples = 0;

    std::size_t harmonics() const noexcept { return coeffs.size(); }
};

/// Inclusive harmonic index range [m1, m2].
struct BandSpec {
    std::size_t m1 = 1;
    std::size_t m2 = 1;
};

/// Default P0 is the observation span N*dt.
double default_base_period(const TimeSeries& series);

/// floor((N-2)/2), capped at 120.
std::size_t default_harmonics(std::size_t samples);

/// Throws Underdetermined when N < 2n+2, SingularNormalMatrix when the
/// design matrix is rank deficient (message carries the condition estimate).
PfaModel fit_pfa(const TimeSeries& series, double base_period, std::size_t harmonics);

std::vector<double> evaluate_pfa(const PfaModel& model, std::span<const double> times);

/// Harmonics m1..m2 only; trend terms excluded. Throws BandOutOfRange.
std::vector<double> band_component(const PfaModel& model, const BandSpec& band, std::span<const double> times);

/// (shortest, longest) period of the band: (P0/m2, P0/m1).
std::pair<double, double> band_periods(const PfaModel& model, const BandSpec& band);
std::pair<double, double> band_periods(double base_period, const BandSpec& band);

/// Pearson correlation. Throws LengthMismatch, TooShort (< 3) or ZeroVariance.
double band_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace wavecoh::pfa
