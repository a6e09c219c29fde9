#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "wavecoh/cwt.hpp"
#include "wavecoh/grid.hpp"

namespace wavecoh::coherence {

enum class TimeKernel {
    morlet_envelope,  // |psi| at each scale, truncated at 3 e-folding times
    delta,            // no time smoothing
};

struct SmoothingSpec {
    TimeKernel time_kernel = TimeKernel::morlet_envelope;
    std::size_t scale_window = 1;  // boxcar width along scale, in voices (odd)
    double truncation_efolds = 3.0;

    /// Morlet envelope in time and a boxcar of 0.6 decades of scale, rounded
    /// to the nearest odd number of voices.
    static SmoothingSpec defaults(std::size_t voices_per_octave);
    /// Delta kernels in both directions; coherence degenerates to 1.
    static SmoothingSpec none();
};

struct CrossSpectrum {
    cwt::ScaleGrid grid;
    double t0 = 0.0;
    double dt = 1.0;
    ComplexGrid values;
};

/// Throws GridMismatch unless both spectra share scales, time axis and step.
void check_compatible(const cwt::WaveletSpectrum& wx, const cwt::WaveletSpectrum& wy);

/// W^X conj(W^Y) elementwise.
CrossSpectrum cross_spectrum(const cwt::WaveletSpectrum& wx, const cwt::WaveletSpectrum& wy);

/// Precomputed time and scale smoothing for one (grid, length, step, wavelet).
/// Time smoothing convolves each row with the normalized |psi| at that
/// scale; rows near the edges are renormalized by the kernel weight that
/// actually overlaps the record. Scale smoothing is an edge-renormalized
/// boxcar over `scale_window` rows.
class Smoother {
public:
    Smoother(const cwt::ScaleGrid& grid, std::size_t length, double dt, const cwt::MorletParams& params,
             const SmoothingSpec& spec);

    void smooth_time(ComplexGrid& field) const;
    void smooth_scale(ComplexGrid& field) const;
    void apply(ComplexGrid& field) const;

    std::size_t length() const noexcept { return length_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    const SmoothingSpec& spec() const noexcept { return spec_; }

    /// Sampled, unit-sum time kernel for one scale (offsets -K..K).
    const std::vector<double>& kernel(std::size_t row) const { return rows_[row].taps; }

private:
    struct Row {
        std::vector<double> taps;                  // kernel, offsets -K..K, sums to 1
        std::vector<std::complex<double>> shape;  // DFT of the circularly placed kernel
        std::vector<double> overlap;               // kernel weight inside the record per time
    };

    void check_dimensions(const ComplexGrid& field) const;

    std::size_t length_;
    SmoothingSpec spec_;
    std::vector<Row> rows_;
};

/// Convenience: builds a Smoother for the field's grid and applies it.
ComplexGrid smooth(const ComplexGrid& field, const cwt::ScaleGrid& grid, double dt, const cwt::MorletParams& params,
                   const SmoothingSpec& spec);

struct PhaseResult {
    RealGrid angle;     // (-pi, pi]; 0 where undefined
    MaskGrid defined;   // false where the smoothed cross spectrum is exactly zero
};

/// Four-quadrant angle; positive means X leads Y.
PhaseResult phase(const ComplexGrid& smoothed_cross);

struct CoherenceResult {
    RealGrid r2;        // [0, 1]; NaN where undefined
    RealGrid phase;     // (-pi, pi]; NaN where r2 undefined, 0 where the cross spectrum vanishes
    MaskGrid defined;   // false where a smoothed power falls below 1e-300
    ComplexGrid smoothed_cross;
    cwt::ScaleGrid grid;
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> coi;
    cwt::MorletParams params;
    SmoothingSpec smoothing;

    std::size_t size() const noexcept { return static_cast<std::size_t>(r2.cols()); }
    std::vector<double> times() const;
};

/// Wavelet-squared coherency
///   R^2 = |S(W^XY / s)|^2 / (S(|W^X|^2 / s) S(|W^Y|^2 / s))
/// with its phase taken from the same smoothed cross spectrum.
CoherenceResult coherence(const cwt::WaveletSpectrum& wx, const cwt::WaveletSpectrum& wy, const SmoothingSpec& spec);
CoherenceResult coherence(const cwt::WaveletSpectrum& wx, const cwt::WaveletSpectrum& wy, const Smoother& smoother);

}  // namespace wavecoh::coherence
