#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "wavecoh/error.hpp"
#include "wavecoh/series.hpp"

using namespace wavecoh;

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

std::vector<double> values(const TimeSeries& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

TEST_CASE("new_series validates its inputs") {
    const auto s = new_series(850.0, 1.0, std::vector<double>(1161, 1361.0), "TSI");
    CHECK(s.size() == 1161);
    CHECK(s.t0() == 850.0);
    CHECK(s.t_end() == 2010.0);
    CHECK(s.label() == "TSI");

    const auto one = new_series(0.0, 1.0, {1.0}, "one");
    CHECK(one.size() == 1);

    CHECK(code_of([] { new_series(0.0, 0.0, {1.0}, "bad"); }) == Errc::NonPositiveStep);
    CHECK(code_of([] { new_series(0.0, -1.0, {1.0}); }) == Errc::NonPositiveStep);
    CHECK(code_of([] { new_series(0.0, 1.0, {}); }) == Errc::EmptySeries);
    try {
        new_series(0.0, 1.0, {1.0, 2.0, std::nan("")});
        FAIL("expected NonFiniteValue");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonFiniteValue);
        CHECK(e.detail() == 2);
    }
    CHECK(code_of([] { new_series(0.0, 1.0, {INFINITY}); }) == Errc::NonFiniteValue);
}

TEST_CASE("sample times are exactly t0 + i dt") {
    const auto s = new_series(1.5, 0.25, std::vector<double>(9, 0.0));
    const auto t = s.times();
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == 1.5 + static_cast<double>(i) * 0.25);
}

TEST_CASE("mean_epoch is the midpoint of the record") {
    CHECK(mean_epoch(new_series(800.0, 1.0, std::vector<double>(1211, 0.0))) == 1405.0);
    CHECK(mean_epoch(new_series(0.0, 1.0, {1, 2, 3})) == 1.0);
    CHECK(mean_epoch(new_series(850.0, 1.0, std::vector<double>(1161, 0.0))) == 1430.0);
}

TEST_CASE("detrend_linear removes the least-squares line") {
    for (double v : values(detrend_linear(new_series(0.0, 1.0, {0, 1, 2, 3})))) CHECK(std::abs(v) < 1e-14);
    for (double v : values(detrend_linear(new_series(0.0, 1.0, {5, 5, 5})))) CHECK(std::abs(v) < 1e-14);
    CHECK(code_of([] { detrend_linear(new_series(0.0, 1.0, {1.0})); }) == Errc::TooShort);
}

TEST_CASE("detrend_linear leaves a complete sine as the normal equations predict") {
    const std::size_t n = 240;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(2.0 * std::numbers::pi * 3.0 * static_cast<double>(i) / n);
    const auto out = values(detrend_linear(new_series(0.0, 1.0, v)));

    // Independent line fit through the normal equations.
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = static_cast<double>(i);
        y(i) = v[i];
    }
    const Eigen::VectorXd c = oracle::normal_equations(a, y);
    double peak = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double expected = v[i] - c(0) - c(1) * static_cast<double>(i);
        diff = std::max(diff, std::abs(out[i] - expected));
        peak = std::max(peak, std::abs(v[i]));
    }
    CHECK(diff / peak < 1e-12);
}

TEST_CASE("detrend_linear is idempotent and leaves zero mean and slope") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng() % 500;
        auto v = oracle::white_noise(n, rng());
        const double slope = std::uniform_real_distribution<double>(-10, 10)(rng);
        for (std::size_t i = 0; i < n; ++i) v[i] += 100.0 + slope * static_cast<double>(i);
        const auto once = detrend_linear(new_series(1000.0, 0.5, v));
        const auto twice = detrend_linear(once);
        double scale = 0.0;
        double diff = 0.0;
        double m = 0.0;
        double s = 0.0;
        const double tm = 0.5 * static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            scale = std::max(scale, std::abs(once.values()[i]));
            diff = std::max(diff, std::abs(once.values()[i] - twice.values()[i]));
            m += once.values()[i];
            s += once.values()[i] * (static_cast<double>(i) - tm);
        }
        CHECK(diff <= 1e-12 * std::max(scale, 1.0));
        CHECK(std::abs(m) / static_cast<double>(n) < 1e-10);
        CHECK(std::abs(s) / static_cast<double>(n * n) < 1e-10);
    }
}

TEST_CASE("overlap trims both series to the common interval") {
    const auto amo = new_series(800.0, 1.0, std::vector<double>(1211, 0.0), "AMO");
    const auto tsi = new_series(850.0, 1.0, std::vector<double>(1162, 1361.0), "TSI");
    const auto p = overlap(amo, tsi);
    CHECK(p.a.size() == 1161);
    CHECK(p.b.size() == 1161);
    CHECK(p.a.t0() == 850.0);
    CHECK(p.a.t_end() == 2010.0);
    CHECK(p.b.t0() == 850.0);
    CHECK(p.a.label() == "AMO");

    const auto same = overlap(tsi, tsi);
    CHECK(same.a.size() == tsi.size());
    CHECK(values(same.b) == values(tsi));

    const auto x = new_series(0.0, 1.0, std::vector<double>(11, 0.0));
    const auto y = new_series(20.0, 1.0, std::vector<double>(11, 0.0));
    CHECK(code_of([&] { overlap(x, y); }) == Errc::NoOverlap);
    const auto touching = new_series(10.0, 1.0, std::vector<double>(5, 0.0));
    CHECK(code_of([&] { overlap(x, touching); }) == Errc::NoOverlap);

    CHECK(code_of([&] { overlap(x, new_series(0.0, 2.0, std::vector<double>(5, 0.0))); }) == Errc::IncompatibleGrid);
    CHECK(code_of([&] { overlap(x, new_series(0.5, 1.0, std::vector<double>(5, 0.0))); }) == Errc::IncompatibleGrid);
    // Offsets within the phase tolerance are accepted.
    CHECK(overlap(x, new_series(2.0 + 1e-11, 1.0, std::vector<double>(5, 0.0))).a.size() == 5);
}

TEST_CASE("overlap is commutative up to swapping members") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const double ta = static_cast<double>(rng() % 50);
        const double tb = static_cast<double>(rng() % 50);
        const auto a = new_series(ta, 1.0, oracle::white_noise(30 + rng() % 40, rng()));
        const auto b = new_series(tb, 1.0, oracle::white_noise(30 + rng() % 40, rng()));
        const auto ab = overlap(a, b);
        const auto ba = overlap(b, a);
        CHECK(ab.a.t0() == ba.b.t0());
        CHECK(values(ab.a) == values(ba.b));
        CHECK(values(ab.b) == values(ba.a));
    }
}

TEST_CASE("standardize gives zero mean and unit sample variance") {
    const auto two = values(standardize(new_series(0.0, 1.0, {1, 3})));
    CHECK(two[0] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-14));
    CHECK(two[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

    CHECK(code_of([] { standardize(new_series(0.0, 1.0, {4, 4, 4})); }) == Errc::ZeroVariance);
    CHECK(code_of([] { standardize(new_series(0.0, 1.0, {4})); }) == Errc::TooShort);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto v = oracle::white_noise(2 + rng() % 400, rng());
        for (double& x : v) x = 1361.0 + 3.0 * x;
        const auto s = standardize(new_series(0.0, 1.0, v));
        CHECK(std::abs(mean(s.values())) < 1e-12);
        CHECK(std::abs(sample_variance(s.values()) - 1.0) < 1e-12);
        const auto again = standardize(s);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(again.values()[i] - s.values()[i]) < 1e-12);
    }
}
