#include "wavecoh/significance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "wavecoh/error.hpp"
#include "wavecoh/fft.hpp"

namespace wavecoh::significance {

void McConfig::validate() const {
    if (n_surrogates < 30) {
        throw Error(Errc::InsufficientSurrogates,
                    std::to_string(n_surrogates) + " surrogates requested, at least 30 are required");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(Errc::InvalidArgument, "significance level alpha must lie in (0, 1)");
    }
}

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(2 * index + stream + 1));
}

TimeSeries phase_randomize(const TimeSeries& series, std::uint64_t seed) {
    const std::size_t n = series.size();
    if (n < 4) throw Error(Errc::SeriesTooShort, "phase randomization needs at least 4 samples");

    auto spectrum = fft::forward_real(series.values());
    // mt19937_64 output is fixed by the standard; the 53-bit mapping to [0, 1)
    // is done by hand because distribution objects are implementation-defined.
    std::mt19937_64 rng(seed);
    const std::size_t last_positive = (n - 1) / 2;  // excludes Nyquist for even n
    for (std::size_t k = 1; k <= last_positive; ++k) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double amplitude = std::abs(spectrum[k]);
        spectrum[k] = std::polar(amplitude, 2.0 * std::numbers::pi * u);
        spectrum[n - k] = std::conj(spectrum[k]);
    }
    spectrum[0] = spectrum[0].real();
    if (n % 2 == 0) spectrum[n / 2] = spectrum[n / 2].real();

    fft::inverse(spectrum);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = spectrum[i].real() / static_cast<double>(n);
    return series.with_values(std::move(out));
}

MaskGrid trusted_region(const cwt::ScaleGrid& grid, const std::vector<double>& coi) {
    MaskGrid out(static_cast<Eigen::Index>(grid.num_scales), static_cast<Eigen::Index>(coi.size()));
    const auto periods = grid.periods();
    for (std::size_t j = 0; j < grid.num_scales; ++j) {
        for (std::size_t i = 0; i < coi.size(); ++i) {
            out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = periods[j] < coi[i];
        }
    }
    return out;
}

double quantile(std::vector<double>& values, double q) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
    const double v_lo = values[lo];
    if (lo + 1 >= values.size()) return v_lo;
    const double v_hi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
    return v_lo + (h - static_cast<double>(lo)) * (v_hi - v_lo);
}

std::vector<double> mc_thresholds(const TimeSeries& x, const TimeSeries& y, const cwt::ScaleGrid& grid,
                                  const cwt::MorletParams& params, const coherence::SmoothingSpec& spec,
                                  const McConfig& cfg) {
    cfg.validate();
    if (x.size() != y.size() || std::abs(x.dt() - y.dt()) > 1e-12 * x.dt() ||
        std::abs(x.t0() - y.t0()) > 1e-9 * x.dt()) {
        throw Error(Errc::GridMismatch, "surrogate inputs must be aligned on one time grid");
    }
    params.validate();
    grid.validate_for(x.dt());

    const std::size_t n = x.size();
    const coherence::Smoother smoother(grid, n, x.dt(), params, spec);
    const MaskGrid trusted = trusted_region(grid, cwt::coi(n, x.dt(), params));

    // Surrogate k owns slots [k * count_j, (k + 1) * count_j) of scale j's pool,
    // so workers never share a write location and the pool is index-ordered.
    const std::size_t nscales = grid.num_scales;
    std::vector<std::size_t> count(nscales);
    std::vector<std::vector<double>> pool(nscales);
    for (std::size_t j = 0; j < nscales; ++j) {
        count[j] = static_cast<std::size_t>(trusted.row(static_cast<Eigen::Index>(j)).count());
        pool[j].assign(count[j] * cfg.n_surrogates, std::numeric_limits<double>::quiet_NaN());
    }

    auto run_one = [&](std::size_t k) {
        const auto sx = phase_randomize(x, derive_seed(cfg.seed, k, 0));
        const auto sy = phase_randomize(y, derive_seed(cfg.seed, k, 1));
        const auto wx = cwt::transform(sx, grid, params);
        const auto wy = cwt::transform(sy, grid, params);
        const auto result = coherence::coherence(wx, wy, smoother);
        for (std::size_t j = 0; j < nscales; ++j) {
            double* slot = pool[j].data() + k * count[j];
            const auto jj = static_cast<Eigen::Index>(j);
            for (Eigen::Index i = 0; i < trusted.cols(); ++i) {
                if (trusted(jj, i)) *slot++ = result.r2(jj, i);
            }
        }
    };

    unsigned workers = cfg.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.workers;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.n_surrogates));
    if (workers <= 1) {
        for (std::size_t k = 0; k < cfg.n_surrogates; ++k) run_one(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                for (std::size_t k = next++; k < cfg.n_surrogates; k = next++) {
                    try {
                        run_one(k);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : threads) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<double> thresholds(nscales, 1.0);
    for (std::size_t j = 0; j < nscales; ++j) {
        auto& values = pool[j];
        std::erase_if(values, [](double v) { return std::isnan(v); });
        // A scale with no trusted cells can never be significant.
        if (!values.empty()) thresholds[j] = std::clamp(quantile(values, 1.0 - cfg.alpha), 0.0, 1.0);
    }
    return thresholds;
}

MaskGrid significance_mask(const coherence::CoherenceResult& observed, const std::vector<double>& thresholds) {
    if (thresholds.size() != observed.grid.num_scales ||
        static_cast<std::size_t>(observed.r2.rows()) != observed.grid.num_scales) {
        throw Error(Errc::GridMismatch, std::to_string(thresholds.size()) + " thresholds for " +
                                            std::to_string(observed.grid.num_scales) + " scales");
    }
    const MaskGrid trusted = trusted_region(observed.grid, observed.coi);
    MaskGrid mask(observed.r2.rows(), observed.r2.cols());
    for (Eigen::Index j = 0; j < mask.rows(); ++j) {
        const double limit = thresholds[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < mask.cols(); ++i) {
            mask(j, i) = trusted(j, i) && observed.defined(j, i) && observed.r2(j, i) > limit;
        }
    }
    return mask;
}

}  // namespace wavecoh::significance
