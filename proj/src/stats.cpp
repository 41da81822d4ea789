#include "fbmavg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fbmavg/parallel.hpp"

namespace fbmavg {

int default_thread_count() {
    if (const char* env = std::getenv("FBMAVG_THREADS")) {
        const int k = std::atoi(env);
        if (k > 0)
            return k;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 0)
        threads = default_thread_count();
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += threads)
                    body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& t : workers)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

TestFunction TestFunction::from_name(std::string_view name) {
    if (name == "tanh")
        return TestFunction(Id::tanh_fn);
    if (name == "sin" || name == "sin_scaled")
        return TestFunction(Id::sin_fn);
    if (name == "gauss_bump")
        return TestFunction(Id::gauss_bump);
    if (name == "identity")
        return TestFunction(Id::identity);
    throw std::invalid_argument("TestFunction: unknown name '" + std::string(name) +
                                "' (use tanh, sin, gauss_bump, or identity)");
}

double TestFunction::operator()(double y) const {
    switch (id_) {
    case Id::tanh_fn: return std::tanh(y);
    case Id::sin_fn: return std::sin(y);
    case Id::gauss_bump: return std::exp(-y * y);
    case Id::identity: return y;
    }
    return 0.0;
}

double TestFunction::d1(double y) const {
    switch (id_) {
    case Id::tanh_fn: {
        const double t = std::tanh(y);
        return 1.0 - t * t;
    }
    case Id::sin_fn: return std::cos(y);
    case Id::gauss_bump: return -2.0 * y * std::exp(-y * y);
    case Id::identity: return 1.0;
    }
    return 0.0;
}

double TestFunction::d2(double y) const {
    switch (id_) {
    case Id::tanh_fn: {
        const double t = std::tanh(y);
        return -2.0 * t * (1.0 - t * t);
    }
    case Id::sin_fn: return -std::sin(y);
    case Id::gauss_bump: return (4.0 * y * y - 2.0) * std::exp(-y * y);
    case Id::identity: return 0.0;
    }
    return 0.0;
}

bool TestFunction::bounded() const {
    return id_ != Id::identity; // identity is outside the C_b hypotheses
}

std::string_view TestFunction::name() const {
    switch (id_) {
    case Id::tanh_fn: return "tanh";
    case Id::sin_fn: return "sin";
    case Id::gauss_bump: return "gauss_bump";
    case Id::identity: return "identity";
    }
    return "?";
}

const std::vector<std::string>& TestFunction::catalog() {
    static const std::vector<std::string> names{"tanh", "sin", "gauss_bump", "identity"};
    return names;
}

Estimate prob_exceed(std::span<const std::pair<double, double>> pairs, double eta) {
    if (pairs.empty())
        throw std::invalid_argument("prob_exceed: empty input");
    if (!(eta > 0.0))
        throw std::invalid_argument("prob_exceed: eta must be positive");
    std::size_t count = 0;
    for (const auto& [a, b] : pairs)
        if (std::abs(a - b) > eta)
            ++count;
    const double n = static_cast<double>(pairs.size());
    const double p = static_cast<double>(count) / n;
    return Estimate{p, std::sqrt(p * (1.0 - p) / n)};
}

Estimate conditional_criterion(const CoupledRunRecipe& recipe, const TestFunction& phi,
                               const TimeGrid& grid, int outer, int inner, const RngStream& base,
                               int threads) {
    if (outer < 2)
        throw std::invalid_argument("conditional_criterion: need at least 2 outer samples");
    if (inner < 1)
        throw std::invalid_argument("conditional_criterion: need at least 1 inner sample");

    const SystemSpec& spec = recipe.spec;
    const bool brownian = spec.driver == Driver::brownian;
    const SchemeKind inner_kind = brownian
        ? (is_limiting(spec.ou) ? SchemeKind::brownian_limiting : SchemeKind::brownian_ap)
        : (is_limiting(spec.ou) ? SchemeKind::limiting : SchemeKind::ap);
    const SchemeKind averaged_kind =
        brownian ? SchemeKind::brownian_averaged : SchemeKind::averaged;

    // shared across threads; sample() is const and thread-safe
    std::optional<CirculantFbmSampler> sampler;
    if (!brownian)
        sampler.emplace(grid, spec.h);

    std::vector<double> diffs(outer);
    parallel_for(outer, threads, [&](int i) {
        RngStream s = base.substream("outer").substream(static_cast<std::uint64_t>(i));
        RngStream driver_rng = s.substream("driver");
        const FbmPath path =
            brownian ? sample_brownian_path(grid, driver_rng) : sampler->sample(driver_rng);

        const SchemeTrajectory avg =
            run_scheme(spec, path, GaussianSeq{std::vector<double>(grid.steps, 0.0)},
                       averaged_kind, recipe.quad_order);
        const double ref = phi(avg.states.back());

        // centered accumulation: the residual is exactly zero when the
        // inner scheme reproduces the averaged one pathwise
        RngStream gamma_base = s.substream("gamma");
        double acc = 0.0;
        for (int j = 0; j < inner; ++j) {
            RngStream gamma_rng = gamma_base.substream(static_cast<std::uint64_t>(j));
            const GaussianSeq gammas = sample_gaussian_seq(grid.steps, gamma_rng);
            const SchemeTrajectory traj = run_scheme(spec, path, gammas, inner_kind,
                                                     recipe.quad_order);
            acc += phi(traj.states.back()) - ref;
        }
        diffs[i] = std::abs(acc / inner);
    });

    double sum = 0.0, sum_sq = 0.0;
    for (double d : diffs) {
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / outer;
    const double var = std::max(sum_sq / outer - mean * mean, 0.0);
    return Estimate{mean, std::sqrt(var / outer)};
}

Estimate weak_error(std::span<const double> ensemble, const NormalLaw& reference,
                    const TestFunction& phi, int quad_order) {
    if (ensemble.size() < 2)
        throw std::invalid_argument("weak_error: ensemble too small");
    double sum = 0.0, sum_sq = 0.0;
    for (double v : ensemble) {
        const double p = phi(v);
        sum += p;
        sum_sq += p * p;
    }
    const double n = static_cast<double>(ensemble.size());
    const double mean = sum / n;
    const double se = std::sqrt(std::max(sum_sq / n - mean * mean, 0.0) / n);

    const GaussHermiteRule& rule = gauss_hermite_normal(quad_order);
    const double sd = std::sqrt(reference.var);
    double ref = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        ref += rule.weights[i] * phi(reference.mean + sd * rule.nodes[i]);

    return Estimate{std::abs(mean - ref), se};
}

Estimate weak_error(std::span<const double> ensemble, std::span<const double> reference,
                    const TestFunction& phi) {
    if (ensemble.size() < 2 || reference.size() < 2)
        throw std::invalid_argument("weak_error: ensembles too small");
    auto stats = [&phi](std::span<const double> xs) {
        double sum = 0.0, sum_sq = 0.0;
        for (double v : xs) {
            const double p = phi(v);
            sum += p;
            sum_sq += p * p;
        }
        const double n = static_cast<double>(xs.size());
        const double mean = sum / n;
        return std::pair{mean, std::max(sum_sq / n - mean * mean, 0.0) / n};
    };
    const auto [mean_a, var_a] = stats(ensemble);
    const auto [mean_b, var_b] = stats(reference);
    return Estimate{std::abs(mean_a - mean_b), std::sqrt(var_a + var_b)};
}

RateFit rate_fit(std::span<const double> dts, std::span<const double> errors) {
    if (dts.size() != errors.size())
        throw std::invalid_argument("rate_fit: size mismatch");
    if (dts.size() < 3)
        throw std::invalid_argument("rate_fit: need at least 3 points");
    const int n = static_cast<int>(dts.size());
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        if (!(dts[i] > 0.0) || !(errors[i] > 0.0))
            throw std::domain_error("rate_fit: inputs must be positive");
        lx[i] = std::log(dts[i]);
        ly[i] = std::log(errors[i]);
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return RateFit{slope, intercept, r2};
}

ConvergenceReport make_convergence_report(ConvergenceReport::Axis axis, std::vector<double> grid,
                                          std::vector<Estimate> errors) {
    if (grid.size() != errors.size())
        throw std::invalid_argument("make_convergence_report: size mismatch");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] > grid[i + 1]))
            throw std::invalid_argument("make_convergence_report: grid must strictly decrease");
    std::vector<double> values;
    values.reserve(errors.size());
    for (const Estimate& e : errors) {
        if (e.value < 0.0)
            throw std::invalid_argument("make_convergence_report: errors must be nonnegative");
        values.push_back(e.value);
    }
    const RateFit fit = rate_fit(grid, values);
    return ConvergenceReport{axis, std::move(grid), std::move(errors), fit};
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

namespace {

// Asymptotic Kolmogorov distribution Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_q(double lambda) {
    if (lambda < 1e-8)
        return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16)
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_statistic_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v)
            ++i;
        while (j < b.size() && b[j] <= v)
            ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

double ks_statistic_vs_normal(std::vector<double> sample, double mean, double var) {
    if (sample.empty())
        throw std::invalid_argument("ks_statistic_vs_normal: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    const double sd = std::sqrt(var);
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double cdf = normal_cdf((sample[i] - mean) / sd);
        d = std::max(d, std::max(cdf - i / n, (i + 1) / n - cdf));
    }
    return d;
}

double ks_p_value(double d, double n_effective) {
    const double sn = std::sqrt(n_effective);
    return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

} // namespace fbmavg
