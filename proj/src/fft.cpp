#include "wavecoh/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace wavecoh::fft {

namespace {

// FFTW planning is not thread-safe; execution on an existing plan is.
// Plans are created once per (size, direction) and kept for the process
// lifetime. FFTW_UNALIGNED lets the new-array execute interface run on
// std::vector storage.
class PlanCache {
public:
    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<cplx> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void execute(std::span<cplx> data, int sign) {
    if (data.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(cache().get(data.size(), sign), buf, buf);
}

}  // namespace

void forward(std::span<cplx> data) { execute(data, FFTW_FORWARD); }

void inverse(std::span<cplx> data) { execute(data, FFTW_BACKWARD); }

std::vector<cplx> forward_real(std::span<const double> data) {
    std::vector<cplx> out(data.begin(), data.end());
    forward(out);
    return out;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> angular_frequencies(std::size_t n, double dt) {
    std::vector<double> omega(n);
    const double step = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<double>(k);
        omega[k] = (k <= n / 2) ? kk * step : (kk - static_cast<double>(n)) * step;
    }
    return omega;
}

}  // namespace wavecoh::fft
