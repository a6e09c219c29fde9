#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wavecoh::fft {

using cplx = std::complex<double>;

/// Unnormalized forward DFT, X_k = sum_n x_n exp(-2 pi i k n / N), in place.
void forward(std::span<cplx> data);

/// Unnormalized inverse DFT (no 1/N factor), in place.
void inverse(std::span<cplx> data);

/// Full complex spectrum of a real sequence.
std::vector<cplx> forward_real(std::span<const double> data);

std::size_t next_pow2(std::size_t n);

/// Angular frequencies (rad per unit time) of DFT bins for length n and step dt,
/// in FFT order: 0, ..., positive, negative, ....
std::vector<double> angular_frequencies(std::size_t n, double dt);

}  // namespace wavecoh::fft
