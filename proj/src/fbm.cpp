#include "fbmavg/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include <fftw3.h>

namespace fbmavg {

namespace {

// FFTW's planner is not thread-safe; executions on distinct buffers are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// fGn autocovariance gamma(k) = dt^{2H} (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
double fgn_autocov(int k, double dt, double two_h) {
    const double kk = static_cast<double>(k);
    const double c = std::pow(std::abs(kk + 1.0), two_h) - 2.0 * std::pow(std::abs(kk), two_h) +
                     std::pow(std::abs(kk - 1.0), two_h);
    return 0.5 * std::pow(dt, two_h) * c;
}

} // namespace

double fbm_covariance(double t, double s, HurstIndex h) {
    if (t < 0.0 || s < 0.0)
        throw std::domain_error("fbm_covariance: times must be nonnegative");
    const double two_h = 2.0 * h.value;
    return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

FbmPath path_from_increments(const TimeGrid& grid, std::vector<double> increments) {
    if (static_cast<int>(increments.size()) != grid.steps)
        throw std::invalid_argument("path_from_increments: increment count must equal grid.steps");
    std::vector<double> values(grid.steps + 1);
    values[0] = 0.0;
    for (int n = 0; n < grid.steps; ++n)
        values[n + 1] = values[n] + increments[n];
    return FbmPath{grid, std::move(values), std::move(increments)};
}

FbmPath coarsen_path(const FbmPath& fine, int stride) {
    if (stride < 1 || fine.grid.steps % stride != 0)
        throw std::invalid_argument("coarsen_path: stride must divide the fine step count");
    const int n = fine.grid.steps / stride;
    TimeGrid grid(fine.grid.horizon, n);
    std::vector<double> values(n + 1);
    for (int k = 0; k <= n; ++k)
        values[k] = fine.values[k * stride];
    std::vector<double> increments(n);
    for (int k = 0; k < n; ++k)
        increments[k] = values[k + 1] - values[k];
    FbmPath out{grid, std::move(values), std::move(increments)};
    return out;
}

CholeskyFbmSampler::CholeskyFbmSampler(TimeGrid grid, HurstIndex h, int max_n)
    : grid_(grid), h_(h) {
    const int n = grid_.steps;
    if (n > max_n) {
        std::ostringstream msg;
        msg << "CholeskyFbmSampler: N = " << n << " exceeds guard " << max_n
            << " (O(N^3) reference sampler)";
        throw std::invalid_argument(msg.str());
    }
    // Covariance of (beta(t_1), ..., beta(t_N)), packed lower triangle.
    std::vector<double> cov(static_cast<size_t>(n) * (n + 1) / 2);
    auto at = [n](std::vector<double>& m, int i, int j) -> double& {
        return m[static_cast<size_t>(i) * (i + 1) / 2 + j];
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            at(cov, i, j) = fbm_covariance(grid_.t(i + 1), grid_.t(j + 1), h_);

    chol_.assign(cov.size(), 0.0);
    for (int j = 0; j < n; ++j) {
        double d = at(cov, j, j);
        for (int k = 0; k < j; ++k)
            d -= at(chol_, j, k) * at(chol_, j, k);
        if (!(d > 0.0)) {
            std::ostringstream msg;
            msg << "CholeskyFbmSampler: covariance not positive definite, smallest pivot " << d
                << " at index " << j;
            throw SamplerNumericalError(msg.str());
        }
        at(chol_, j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = at(cov, i, j);
            for (int k = 0; k < j; ++k)
                s -= at(chol_, i, k) * at(chol_, j, k);
            at(chol_, i, j) = s / at(chol_, j, j);
        }
    }
}

FbmPath CholeskyFbmSampler::sample(RngStream& rng) const {
    const int n = grid_.steps;
    std::vector<double> z(n);
    for (double& v : z)
        v = rng.gaussian();
    std::vector<double> values(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = &chol_[static_cast<size_t>(i) * (i + 1) / 2];
        double s = 0.0;
        for (int j = 0; j <= i; ++j)
            s += row[j] * z[j];
        values[i + 1] = s;
    }
    std::vector<double> increments(n);
    for (int i = 0; i < n; ++i)
        increments[i] = values[i + 1] - values[i];
    return FbmPath{grid_, std::move(values), std::move(increments)};
}

struct CirculantFbmSampler::Plan {
    fftw_plan backward = nullptr;
    ~Plan() {
        if (backward) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(backward);
        }
    }
};

CirculantFbmSampler::CirculantFbmSampler(TimeGrid grid, HurstIndex h, int max_doublings)
    : grid_(grid), h_(h), embedding_(0), plan_(std::make_unique<Plan>()) {
    const int n = grid_.steps;
    const double dt = grid_.dt();
    const double two_h = 2.0 * h_.value;
    constexpr double rel_tol = 1e-12; // eigenvalues >= -rel_tol * max treated as zero

    int m = n;
    for (int attempt = 0;; ++attempt) {
        const int len = 2 * m;
        std::vector<std::complex<double>> row(len), freq(len);
        for (int k = 0; k < len; ++k)
            row[k] = fgn_autocov(std::min(k, len - k), dt, two_h);
        {
            std::lock_guard lock(planner_mutex());
            fftw_plan fwd = fftw_plan_dft_1d(
                len, reinterpret_cast<fftw_complex*>(row.data()),
                reinterpret_cast<fftw_complex*>(freq.data()), FFTW_FORWARD,
                FFTW_ESTIMATE | FFTW_UNALIGNED);
            fftw_execute(fwd);
            fftw_destroy_plan(fwd);
        }
        double max_eig = 0.0, min_eig = 0.0;
        for (const auto& f : freq) {
            max_eig = std::max(max_eig, f.real());
            min_eig = std::min(min_eig, f.real());
        }
        if (min_eig >= -rel_tol * max_eig) {
            embedding_ = len;
            spectrum_.resize(len);
            for (int j = 0; j < len; ++j)
                spectrum_[j] = std::sqrt(std::max(freq[j].real(), 0.0) / len);
            break;
        }
        if (attempt >= max_doublings) {
            std::ostringstream msg;
            msg << "CirculantFbmSampler: embedding not nonnegative definite after "
                << max_doublings << " doublings (eigenvalue " << min_eig << ")";
            throw SamplerNumericalError(msg.str());
        }
        m *= 2;
    }

    std::vector<std::complex<double>> in(embedding_), out(embedding_);
    std::lock_guard lock(planner_mutex());
    plan_->backward = fftw_plan_dft_1d(embedding_, reinterpret_cast<fftw_complex*>(in.data()),
                                       reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
}

CirculantFbmSampler::~CirculantFbmSampler() = default;

FbmPath CirculantFbmSampler::sample(RngStream& rng) const {
    const int len = embedding_;
    const int m = len / 2;
    std::vector<std::complex<double>> w(len), y(len);

    w[0] = spectrum_[0] * rng.gaussian();
    w[m] = spectrum_[m] * rng.gaussian();
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    for (int j = 1; j < m; ++j) {
        const double re = rng.gaussian() * inv_sqrt2;
        const double im = rng.gaussian() * inv_sqrt2;
        w[j] = spectrum_[j] * std::complex<double>(re, im);
        w[len - j] = std::conj(w[j]);
    }

    fftw_execute_dft(plan_->backward, reinterpret_cast<fftw_complex*>(w.data()),
                     reinterpret_cast<fftw_complex*>(y.data()));

    std::vector<double> increments(grid_.steps);
    for (int k = 0; k < grid_.steps; ++k)
        increments[k] = y[k].real();
    return path_from_increments(grid_, std::move(increments));
}

FbmPath sample_fbm_cholesky(const TimeGrid& grid, HurstIndex h, RngStream& rng) {
    return CholeskyFbmSampler(grid, h).sample(rng);
}

FbmPath sample_fbm_circulant(const TimeGrid& grid, HurstIndex h, RngStream& rng) {
    return CirculantFbmSampler(grid, h).sample(rng);
}

double holder_seminorm(std::span<const double> values, const TimeGrid& grid, double alpha,
                       double a, double b, bool anchored) {
    if (static_cast<int>(values.size()) != grid.steps + 1)
        throw std::invalid_argument("holder_seminorm: values must have grid.steps + 1 entries");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("holder_seminorm: alpha must lie in (0, 1)");
    if (!(a >= 0.0 && a < b && b <= grid.horizon))
        throw std::invalid_argument("holder_seminorm: require 0 <= a < b <= T");
    (void)anchored; // every grid point satisfies l(t1) = t1 on a pure grid signal

    double sup = 0.0;
    for (int i = 0; i <= grid.steps; ++i) {
        const double ti = grid.t(i);
        if (ti < a)
            continue;
        for (int j = i + 1; j <= grid.steps; ++j) {
            const double tj = grid.t(j);
            if (tj > b)
                break;
            const double ratio = std::abs(values[j] - values[i]) / std::pow(tj - ti, alpha);
            sup = std::max(sup, ratio);
        }
    }
    return sup;
}

} // namespace fbmavg
