#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wavecoh/coherence.hpp"
#include "wavecoh/cwt.hpp"
#include "wavecoh/grid.hpp"
#include "wavecoh/series.hpp"

namespace wavecoh::significance {

enum class SurrogateKind { phase_randomized };

struct McConfig {
    std::size_t n_surrogates = 300;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    SurrogateKind surrogate_kind = SurrogateKind::phase_randomized;
    /// Worker threads for the surrogate loop; 0 picks hardware concurrency.
    /// Results do not depend on this value.
    unsigned workers = 0;

    /// Throws InsufficientSurrogates (n < 30) or InvalidArgument (alpha outside (0, 1)).
    void validate() const;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t z) noexcept;

/// Seed for surrogate `index` of series `stream` (0 = x, 1 = y):
/// splitmix64(seed ^ splitmix64(2 * index + stream + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) noexcept;

/// Same Fourier amplitudes, uniformly random phases on the positive-frequency
/// bins; DC and Nyquist stay real. Throws SeriesTooShort below 4 samples.
TimeSeries phase_randomize(const TimeSeries& series, std::uint64_t seed);

struct SignificanceResult {
    std::vector<double> threshold;  // per scale, r2 quantile at 1 - alpha
    MaskGrid mask;                  // observed r2 > threshold and period < coi
};

/// True where the cell's period lies below the cone of influence at that time.
MaskGrid trusted_region(const cwt::ScaleGrid& grid, const std::vector<double>& coi);

/// Empirical (1 - alpha) quantile of surrogate coherence, pooled per scale
/// over trusted cells. Surrogate pairs are independent of each other and of
/// execution order; the result is bit-identical for a given configuration.
std::vector<double> mc_thresholds(const TimeSeries& x, const TimeSeries& y, const cwt::ScaleGrid& grid,
                                  const cwt::MorletParams& params, const coherence::SmoothingSpec& spec,
                                  const McConfig& cfg);

/// Throws GridMismatch when the threshold count differs from the scale count.
MaskGrid significance_mask(const coherence::CoherenceResult& observed, const std::vector<double>& thresholds);

/// Linear-interpolated empirical quantile (type 7); reorders `values`.
double quantile(std::vector<double>& values, double q);

}  // namespace wavecoh::significance
