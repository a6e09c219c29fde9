#include "wavecoh/series.hpp"

#include <algorithm>
#include <cmath>

#include "wavecoh/error.hpp"

namespace wavecoh {

TimeSeries::TimeSeries(double t0, double dt, std::vector<double> values, std::string label)
    : t0_(t0), dt_(dt), values_(std::move(values)), label_(std::move(label)) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
        throw Error(Errc::NonPositiveStep, "sampling step must be positive, got " + std::to_string(dt_));
    }
    if (!std::isfinite(t0_)) {
        throw Error(Errc::NonFiniteValue, "epoch t0 is not finite");
    }
    if (values_.empty()) {
        throw Error(Errc::EmptySeries, "series '" + label_ + "' has no samples");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(Errc::NonFiniteValue, "sample " + std::to_string(i) + " is not finite", i);
        }
    }
}

std::vector<double> TimeSeries::times() const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = time(i);
    return out;
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    return TimeSeries(t0_, dt_, std::move(values), label_);
}

double mean(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return ss / static_cast<double>(values.size() - 1);
}

double mean_epoch(const TimeSeries& series) {
    return series.t0() + series.dt() * static_cast<double>(series.size() - 1) / 2.0;
}

TimeSeries detrend_linear(const TimeSeries& series) {
    const std::size_t n = series.size();
    if (n < 2) throw Error(Errc::TooShort, "detrending needs at least 2 samples");

    // Centered abscissa makes the two normal equations decouple.
    const auto v = series.values();
    const double centre = static_cast<double>(n - 1) / 2.0;
    const double m = mean(v);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) - centre;
        sxy += x * (v[i] - m);
        sxx += x * x;
    }
    const double slope = sxy / sxx;

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = v[i] - m - slope * (static_cast<double>(i) - centre);
    }
    // A second pass removes the rounding residue of the first fit.
    const double m2 = mean(out);
    for (double& x : out) x -= m2;
    return series.with_values(std::move(out));
}

OverlapPair overlap(const TimeSeries& a, const TimeSeries& b) {
    const double dt = a.dt();
    if (std::abs(a.dt() - b.dt()) > 1e-9 * dt) {
        throw Error(Errc::IncompatibleGrid, "sampling steps differ (" + std::to_string(a.dt()) + " vs " +
                                                std::to_string(b.dt()) + ")");
    }
    const double offset = (b.t0() - a.t0()) / dt;
    const double whole = std::round(offset);
    if (std::abs(offset - whole) > 1e-9) {
        throw Error(Errc::IncompatibleGrid, "sample phases differ by a non-integer number of steps");
    }

    const double start = std::max(a.t0(), b.t0());
    const double end = std::min(a.t_end(), b.t_end());
    const double span_steps = (end - start) / dt;
    if (span_steps < 1.0 - 1e-9) {
        throw Error(Errc::NoOverlap, "series intervals share fewer than 2 samples");
    }
    const auto count = static_cast<std::size_t>(std::llround(span_steps)) + 1;

    auto trim = [&](const TimeSeries& s) {
        const auto first = static_cast<std::size_t>(std::llround((start - s.t0()) / dt));
        const auto v = s.values();
        std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(first),
                                v.begin() + static_cast<std::ptrdiff_t>(first + count));
        return TimeSeries(start, dt, std::move(out), s.label());
    };
    return OverlapPair{trim(a), trim(b)};
}

TimeSeries standardize(const TimeSeries& series) {
    if (series.size() < 2) throw Error(Errc::TooShort, "standardizing needs at least 2 samples");
    const auto v = series.values();
    const double m = mean(v);
    const double var = sample_variance(v);
    // Rounding can leave a constant series with a variance of a few ulps.
    if (!(var > 1e-28 * (1.0 + m * m))) throw Error(Errc::ZeroVariance, "series '" + series.label() + "' is constant");
    const double sd = std::sqrt(var);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - m) / sd;
    return series.with_values(std::move(out));
}

}  // namespace wavecoh
