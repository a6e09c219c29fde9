#include "wavecoh/pfa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "wavecoh/error.hpp"

namespace wavecoh::pfa {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_band(const PfaModel& model, const BandSpec& band) {
    if (band.m1 < 1 || band.m1 > band.m2 || band.m2 > model.harmonics()) {
        std::ostringstream msg;
        msg << "band [" << band.m1 << ", " << band.m2 << "] outside 1.." << model.harmonics();
        throw Error(Errc::BandOutOfRange, msg.str());
    }
}

// Column layout: 0 = f0, 1 = f1, then (sin_k, cos_k) for k = 1..n.
Eigen::MatrixXd design_matrix(std::span<const double> tau, double base_period, std::size_t n) {
    const auto rows = static_cast<Eigen::Index>(tau.size());
    Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(2 * n + 2));
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double x = tau[static_cast<std::size_t>(i)];
        a(i, 0) = 1.0;
        a(i, 1) = x;
        const double w = two_pi * x / base_period;
        for (std::size_t k = 1; k <= n; ++k) {
            const auto col = static_cast<Eigen::Index>(2 * k);
            a(i, col) = std::sin(static_cast<double>(k) * w);
            a(i, col + 1) = std::cos(static_cast<double>(k) * w);
        }
    }
    return a;
}

}  // namespace

double default_base_period(const TimeSeries& series) {
    return static_cast<double>(series.size()) * series.dt();
}

std::size_t default_harmonics(std::size_t samples) {
    if (samples < 4) return 1;
    return std::min<std::size_t>((samples - 2) / 2, 120);
}

PfaModel fit_pfa(const TimeSeries& series, double base_period, std::size_t harmonics) {
    if (!(base_period > 0.0)) throw Error(Errc::InvalidArgument, "base period P0 must be positive");
    if (harmonics < 1) throw Error(Errc::InvalidArgument, "at least one harmonic is required");
    const std::size_t n_obs = series.size();
    const std::size_t n_par = 2 * harmonics + 2;
    if (n_obs < n_par) {
        throw Error(Errc::Underdetermined, std::to_string(n_obs) + " samples cannot determine " +
                                               std::to_string(harmonics) + " harmonics (need " +
                                               std::to_string(n_par) + ")");
    }

    const double t0 = mean_epoch(series);
    std::vector<double> tau(n_obs);
    for (std::size_t i = 0; i < n_obs; ++i) tau[i] = series.time(i) - t0;

    const Eigen::MatrixXd a = design_matrix(tau, base_period, harmonics);
    const Eigen::Map<const Eigen::VectorXd> y(series.values().data(), static_cast<Eigen::Index>(n_obs));

    // Column-pivoting QR on the design matrix itself; the normal matrix is never formed.
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    const auto p = static_cast<Eigen::Index>(n_par);
    const Eigen::VectorXd rdiag = qr.matrixR().topLeftCorner(p, p).diagonal().cwiseAbs();
    const double cond = rdiag.maxCoeff() / rdiag.minCoeff();
    if (qr.rank() < p || !(cond < 1e12)) {
        std::ostringstream msg;
        msg << "design matrix rank " << qr.rank() << " of " << p << ", condition estimate " << cond;
        throw Error(Errc::SingularNormalMatrix, msg.str());
    }

    const Eigen::VectorXd x = qr.solve(y);
    const Eigen::VectorXd resid = y - a * x;
    const double rss = resid.squaredNorm();

    // Cov = s^2 (A^T A)^{-1} = s^2 P R^{-1} R^{-T} P^T.
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::VectorXd diag_perm = r_inv.rowwise().squaredNorm();
    Eigen::VectorXd diag(p);
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = 0; j < p; ++j) diag(perm(j)) = diag_perm(j);

    const double dof = static_cast<double>(n_obs - n_par);
    const double s2 = dof > 0.0 ? rss / dof : 0.0;

    PfaModel model;
    model.base_period = base_period;
    model.mean_epoch = t0;
    model.samples = n_obs;
    model.residual_rms = std::sqrt(rss / static_cast<double>(n_obs));
    model.f0 = x(0);
    model.f1 = x(1);
    model.sigma_f0 = std::sqrt(s2 * diag(0));
    model.sigma_f1 = std::sqrt(s2 * diag(1));
    model.coeffs.resize(harmonics);
    model.sigma.resize(harmonics);
    for (std::size_t k = 1; k <= harmonics; ++k) {
        const auto col = static_cast<Eigen::Index>(2 * k);
        model.coeffs[k - 1] = {x(col), x(col + 1)};
        model.sigma[k - 1] = {std::sqrt(s2 * diag(col)), std::sqrt(s2 * diag(col + 1))};
    }
    return model;
}

std::vector<double> evaluate_pfa(const PfaModel& model, std::span<const double> times) {
    std::vector<double> out(times.size());
    const BandSpec all{1, model.harmonics()};
    const auto harmonic = band_component(model, all, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        out[i] = model.f0 + model.f1 * (times[i] - model.mean_epoch) + harmonic[i];
    }
    return out;
}

std::vector<double> band_component(const PfaModel& model, const BandSpec& band, std::span<const double> times) {
    check_band(model, band);
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double w = two_pi * (times[i] - model.mean_epoch) / model.base_period;
        double sum = 0.0;
        for (std::size_t k = band.m1; k <= band.m2; ++k) {
            const double phase = static_cast<double>(k) * w;
            const auto& c = model.coeffs[k - 1];
            sum += c.a * std::sin(phase) + c.b * std::cos(phase);
        }
        out[i] = sum;
    }
    return out;
}

std::pair<double, double> band_periods(double base_period, const BandSpec& band) {
    return {base_period / static_cast<double>(band.m2), base_period / static_cast<double>(band.m1)};
}

std::pair<double, double> band_periods(const PfaModel& model, const BandSpec& band) {
    check_band(model, band);
    return band_periods(model.base_period, band);
}

double band_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(Errc::LengthMismatch,
                    "lengths differ (" + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
    }
    if (x.size() < 3) throw Error(Errc::TooShort, "correlation needs at least 3 samples");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(Errc::ZeroVariance, "correlation of a constant sequence");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace wavecoh::pfa
