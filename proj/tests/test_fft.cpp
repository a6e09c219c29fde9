#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wavecoh/fft.hpp"

using namespace wavecoh;

TEST_CASE("forward matches the direct DFT for assorted lengths") {
    for (std::size_t n : {1u, 2u, 7u, 16u, 30u, 97u, 128u}) {
        const auto x = oracle::white_noise(n, n);
        const auto ref = oracle::dft(x);
        const auto got = fft::forward_real(x);
        REQUIRE(got.size() == n);
        for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(got[k] - ref[k]) < 1e-10 * static_cast<double>(n));
    }
}

TEST_CASE("inverse undoes forward up to the factor N") {
    const auto x = oracle::white_noise(100, 3);
    std::vector<fft::cplx> work(x.begin(), x.end());
    fft::forward(work);
    fft::inverse(work);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(work[i] / 100.0 - x[i]) < 1e-12);
}

TEST_CASE("next_pow2 and angular frequencies") {
    CHECK(fft::next_pow2(1) == 1);
    CHECK(fft::next_pow2(5) == 8);
    CHECK(fft::next_pow2(1024) == 1024);
    CHECK(fft::next_pow2(1025) == 2048);

    const auto w = fft::angular_frequencies(8, 0.5);
    const double base = 2.0 * std::numbers::pi / (8 * 0.5);
    const std::vector<double> k{0, 1, 2, 3, 4, -3, -2, -1};
    REQUIRE(w.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(w[i] == doctest::Approx(k[i] * base));
}
