#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wavecoh {

/// Uniformly sampled scalar series. Sample i lives at t0 + i*dt (years).
class TimeSeries {
public:
    /// Validating constructor; throws NonPositiveStep, EmptySeries or
    /// NonFiniteValue (detail = offending index).
    TimeSeries(double t0, double dt, std::vector<double> values, std::string label = {});

    double t0() const noexcept { return t0_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    const std::string& label() const noexcept { return label_; }

    double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }
    double t_end() const noexcept { return time(values_.size() - 1); }
    std::vector<double> times() const;

    TimeSeries with_values(std::vector<double> values) const;

private:
    double t0_;
    double dt_;
    std::vector<double> values_;
    std::string label_;
};

inline TimeSeries new_series(double t0, double dt, std::vector<double> values, std::string label = {}) {
    return TimeSeries(t0, dt, std::move(values), std::move(label));
}

/// Two series on an identical time grid.
struct OverlapPair {
    TimeSeries a;
    TimeSeries b;
};

double mean_epoch(const TimeSeries& series);

TimeSeries detrend_linear(const TimeSeries& series);

/// Trims both series to their maximal common interval.
/// Grids must share dt and sample phase to within 1e-9*dt.
OverlapPair overlap(const TimeSeries& a, const TimeSeries& b);

/// Zero mean, unit sample variance (divisor N-1).
TimeSeries standardize(const TimeSeries& series);

double mean(std::span<const double> values);
double sample_variance(std::span<const double> values);

}  // namespace wavecoh
