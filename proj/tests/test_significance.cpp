#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wavecoh/error.hpp"
#include "wavecoh/significance.hpp"

using namespace wavecoh;
using significance::McConfig;

namespace {

Errc code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::InvalidArgument;
}

const auto params = cwt::MorletParams::from_omega0(6.0);

struct Fixture {
    TimeSeries x;
    TimeSeries y;
    cwt::ScaleGrid grid;
    coherence::SmoothingSpec spec;
};

Fixture noise_fixture(std::size_t n, std::uint64_t seed) {
    auto grid = cwt::make_scale_grid(2.0, 6, 5, params);
    return {standardize(new_series(0.0, 1.0, oracle::white_noise(n, seed))),
            standardize(new_series(0.0, 1.0, oracle::white_noise(n, seed + 1))), grid,
            coherence::SmoothingSpec::defaults(6)};
}

McConfig config(std::size_t n, std::uint64_t seed, unsigned workers = 1) {
    McConfig cfg;
    cfg.n_surrogates = n;
    cfg.seed = seed;
    cfg.workers = workers;
    return cfg;
}

coherence::CoherenceResult observe(const Fixture& f) {
    return coherence::coherence(cwt::transform(f.x, f.grid, params), cwt::transform(f.y, f.grid, params), f.spec);
}

}  // namespace

TEST_CASE("McConfig rejects too few surrogates and alpha outside (0, 1)") {
    CHECK_NOTHROW(config(30, 1).validate());
    CHECK(code_of([] { config(29, 1).validate(); }) == Errc::InsufficientSurrogates);
    for (double alpha : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
        auto cfg = config(300, 1);
        cfg.alpha = alpha;
        CHECK(code_of([&] { cfg.validate(); }) == Errc::InvalidArgument);
    }
    const auto f = noise_fixture(64, 1);
    CHECK(code_of([&] { significance::mc_thresholds(f.x, f.y, f.grid, params, f.spec, config(10, 1)); }) ==
          Errc::InsufficientSurrogates);
}

TEST_CASE("splitmix64 and derived seeds") {
    // Reference outputs of the SplitMix64 generator seeded with 0.
    CHECK(significance::splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(significance::splitmix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
    CHECK(significance::derive_seed(7, 3, 0) ==
          significance::splitmix64(7 ^ significance::splitmix64(7)));
    CHECK(significance::derive_seed(7, 3, 1) ==
          significance::splitmix64(7 ^ significance::splitmix64(8)));
    std::vector<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 500; ++k) {
        seen.push_back(significance::derive_seed(1, k, 0));
        seen.push_back(significance::derive_seed(1, k, 1));
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("phase_randomize keeps the amplitude spectrum and the mean") {
    for (std::size_t n : {4u, 5u, 64u, 101u, 256u}) {
        auto v = oracle::white_noise(n, n);
        for (double& x : v) x += 3.0;
        const auto s = new_series(10.0, 0.5, v, "noise");
        const auto surrogate = significance::phase_randomize(s, 99);
        CHECK(surrogate.size() == n);
        CHECK(surrogate.t0() == 10.0);
        CHECK(surrogate.dt() == 0.5);
        const auto a = oracle::dft(v);
        const std::vector<double> sv(surrogate.values().begin(), surrogate.values().end());
        const auto b = oracle::dft(sv);
        double peak = 0.0;
        for (const auto& c : a) peak = std::max(peak, std::abs(c));
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(std::abs(a[k]) - std::abs(b[k])) <= 1e-10 * peak);
        CHECK(std::abs(mean(surrogate.values()) - mean(s.values())) < 1e-10);
    }
}

TEST_CASE("phase_randomize is seed-deterministic") {
    const auto s = new_series(0.0, 1.0, oracle::white_noise(128, 4));
    const auto a = significance::phase_randomize(s, 1);
    const auto b = significance::phase_randomize(s, 1);
    const auto c = significance::phase_randomize(s, 2);
    double same = 0.0;
    double differ = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        same = std::max(same, std::abs(a.values()[i] - b.values()[i]));
        differ = std::max(differ, std::abs(a.values()[i] - c.values()[i]));
    }
    CHECK(same == 0.0);
    CHECK(differ > 0.0);
    CHECK(code_of([] { significance::phase_randomize(new_series(0.0, 1.0, {1, 2, 3}), 1); }) ==
          Errc::SeriesTooShort);
}

TEST_CASE("quantile is the linearly interpolated type 7 estimator") {
    std::vector<double> v{3, 1, 2, 4};
    CHECK(significance::quantile(v, 0.0) == 1.0);
    v = {3, 1, 2, 4};
    CHECK(significance::quantile(v, 1.0) == 4.0);
    v = {3, 1, 2, 4};
    CHECK(significance::quantile(v, 0.5) == doctest::Approx(2.5));
    std::vector<double> empty;
    CHECK(std::isnan(significance::quantile(empty, 0.5)));

    // Sorting oracle on random data.
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        auto data = oracle::white_noise(1 + rng() % 200, rng());
        const double q = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        auto sorted = data;
        std::sort(sorted.begin(), sorted.end());
        const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
        const auto lo = static_cast<std::size_t>(h);
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        const double expected = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
        CHECK(significance::quantile(data, q) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("thresholds lie in [0, 1] and are bit-identical across worker counts") {
    const auto f = noise_fixture(200, 21);
    const auto serial = significance::mc_thresholds(f.x, f.y, f.grid, params, f.spec, config(40, 5, 1));
    const auto parallel = significance::mc_thresholds(f.x, f.y, f.grid, params, f.spec, config(40, 5, 4));
    const auto again = significance::mc_thresholds(f.x, f.y, f.grid, params, f.spec, config(40, 5, 3));
    REQUIRE(serial.size() == f.grid.num_scales);
    for (double t : serial) {
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
    }
    CHECK(serial == parallel);
    CHECK(serial == again);
    const auto other = significance::mc_thresholds(f.x, f.y, f.grid, params, f.spec, config(40, 6, 1));
    CHECK(other != serial);
}

TEST_CASE("doubling the surrogate count moves thresholds by less than 0.03") {
    const auto f = noise_fixture(256, 33);
    const auto base = significance::mc_thresholds(f.x, f.y, f.grid, params, f.spec, config(300, 9));
    const auto doubled = significance::mc_thresholds(f.x, f.y, f.grid, params, f.spec, config(600, 9));
    const auto periods = f.grid.periods();
    const auto coi = cwt::coi(256, 1.0, params);
    const double widest = *std::max_element(coi.begin(), coi.end());
    for (std::size_t j = 0; j < base.size(); ++j) {
        if (periods[j] >= widest) continue;  // no trusted cells, both thresholds pinned at 1
        CAPTURE(periods[j]);
        CHECK(std::abs(base[j] - doubled[j]) < 0.03);
    }
}

TEST_CASE("mc_thresholds requires an aligned pair") {
    const auto f = noise_fixture(128, 2);
    const auto shorter = new_series(0.0, 1.0, oracle::white_noise(100, 3));
    const auto shifted = new_series(1.0, 1.0, oracle::white_noise(128, 3));
    CHECK(code_of([&] { significance::mc_thresholds(f.x, shorter, f.grid, params, f.spec, config(30, 1)); }) ==
          Errc::GridMismatch);
    CHECK(code_of([&] { significance::mc_thresholds(f.x, shifted, f.grid, params, f.spec, config(30, 1)); }) ==
          Errc::GridMismatch);
}

TEST_CASE("significance_mask gates on thresholds and the cone of influence") {
    const auto f = noise_fixture(300, 41);
    const auto observed = observe(f);
    const auto trusted = significance::trusted_region(f.grid, observed.coi);

    const auto none = significance::significance_mask(observed, std::vector<double>(f.grid.num_scales, 1.0));
    CHECK(none.count() == 0);

    const auto all = significance::significance_mask(observed, std::vector<double>(f.grid.num_scales, 0.0));
    CHECK((all == trusted).all());
    CHECK(trusted.count() > 0);
    CHECK(trusted.count() < trusted.size());

    CHECK(code_of([&] {
              significance::significance_mask(observed, std::vector<double>(f.grid.num_scales - 1, 0.5));
          }) == Errc::GridMismatch);

    const auto thresholds = significance::mc_thresholds(f.x, f.y, f.grid, params, f.spec, config(30, 3));
    const auto mask = significance::significance_mask(observed, thresholds);
    const auto periods = f.grid.periods();
    for (Eigen::Index j = 0; j < mask.rows(); ++j) {
        for (Eigen::Index i = 0; i < mask.cols(); ++i) {
            if (!mask(j, i)) continue;
            CHECK(periods[static_cast<std::size_t>(j)] < observed.coi[static_cast<std::size_t>(i)]);
            CHECK(observed.r2(j, i) > thresholds[static_cast<std::size_t>(j)]);
        }
    }
}

TEST_CASE("trusted_region follows period < coi") {
    const auto grid = cwt::make_scale_grid(2.0, 4, 3, params);
    const std::vector<double> coi{0.0, 3.0, 100.0, 3.0, 0.0};
    const auto t = significance::trusted_region(grid, coi);
    const auto periods = grid.periods();
    for (std::size_t j = 0; j < grid.num_scales; ++j) {
        for (std::size_t i = 0; i < coi.size(); ++i) {
            CHECK(t(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) == (periods[j] < coi[i]));
        }
    }
    CHECK_FALSE(t.col(0).any());
    CHECK(t.col(2).all());
}
