#include "fbmavg/averaging.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace fbmavg {

namespace {

// Orthonormal physicists' Hermite polynomial and its derivative at y.
// h_{k+1} = sqrt(2/(k+1)) y h_k - sqrt(k/(k+1)) h_{k-1}, h'_n = sqrt(2n) h_{n-1}.
struct HermiteEval {
    double value;
    double deriv;
};

HermiteEval orthonormal_hermite(int n, double y) {
    constexpr double inv_pi_quarter = 0.7511255444649424829; // pi^{-1/4}
    double hm1 = 0.0;
    double h = inv_pi_quarter;
    for (int k = 0; k < n; ++k) {
        const double hp1 =
            std::sqrt(2.0 / (k + 1)) * y * h - std::sqrt(static_cast<double>(k) / (k + 1)) * hm1;
        hm1 = h;
        h = hp1;
    }
    return {h, std::sqrt(2.0 * n) * hm1};
}

// Roots of the order-n physicists' Hermite polynomial, built up order by
// order via interlacing bisection plus Newton polish.
std::vector<double> hermite_roots(int order) {
    std::vector<double> roots{0.0}; // order 1
    for (int n = 2; n <= order; ++n) {
        const double bound = std::sqrt(2.0 * n + 1.0) + 1.0;
        std::vector<double> brackets;
        brackets.push_back(-bound);
        brackets.insert(brackets.end(), roots.begin(), roots.end());
        brackets.push_back(bound);

        std::vector<double> next(n);
        for (int i = 0; i < n; ++i) {
            double lo = brackets[i], hi = brackets[i + 1];
            double flo = orthonormal_hermite(n, lo).value;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fmid = orthonormal_hermite(n, mid).value;
                if ((flo < 0.0) == (fmid < 0.0)) {
                    lo = mid;
                    flo = fmid;
                } else {
                    hi = mid;
                }
            }
            double y = 0.5 * (lo + hi);
            for (int it = 0; it < 4; ++it) {
                const auto [f, df] = orthonormal_hermite(n, y);
                if (df == 0.0)
                    break;
                y -= f / df;
            }
            next[i] = y;
        }
        roots = std::move(next);
    }
    return roots;
}

GaussHermiteRule build_rule(int order) {
    // Physicists' weights w_i = 2 / h'_n(y_i)^2 for weight exp(-y^2);
    // substitution m = sqrt(2) y converts to the standard normal weight.
    constexpr double inv_sqrt_pi = 0.5641895835477562869;
    const std::vector<double> ys = hermite_roots(order);
    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        const auto [f, df] = orthonormal_hermite(order, ys[i]);
        (void)f;
        rule.nodes[i] = std::sqrt(2.0) * ys[i];
        rule.weights[i] = 2.0 / (df * df) * inv_sqrt_pi;
    }
    return rule;
}

} // namespace

const GaussHermiteRule& gauss_hermite_normal(int order) {
    if (order < 2)
        throw std::invalid_argument("gauss_hermite_normal: order must be >= 2");
    if (order > 256)
        throw std::invalid_argument("gauss_hermite_normal: order above 256 not supported");

    static std::shared_mutex mutex;
    static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(order); it != cache.end())
            return *it->second;
    }
    auto rule = std::make_unique<GaussHermiteRule>(build_rule(order));
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.try_emplace(order, std::move(rule));
    (void)inserted;
    return *it->second;
}

double averaged_g(const CoeffExpr& g, double x, int quad_order) {
    const GaussHermiteRule& rule = gauss_hermite_normal(quad_order);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * g.eval(x, rule.nodes[i]);
    return acc;
}

double averaged_g2_sqrt(const CoeffExpr& g, double x, int quad_order) {
    const GaussHermiteRule& rule = gauss_hermite_normal(quad_order);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double v = g.eval(x, rule.nodes[i]);
        acc += rule.weights[i] * v * v;
    }
    return std::sqrt(std::max(acc, 0.0));
}

Estimate mc_average(const CoeffExpr& g, double x, int power, int samples, RngStream& rng) {
    if (power != 1 && power != 2)
        throw std::invalid_argument("mc_average: power must be 1 or 2");
    if (samples < 100)
        throw std::invalid_argument("mc_average: need at least 100 samples");
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
        double v = g.eval(x, rng.gaussian());
        if (power == 2)
            v *= v;
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / samples;
    const double var = std::max(sum_sq / samples - mean * mean, 0.0);
    return Estimate{mean, std::sqrt(var / samples)};
}

AveragedCoeff::AveragedCoeff(CoeffExpr g, Kind kind, int quad_order)
    : g_(std::move(g)), kind_(kind), order_(quad_order) {
    if (g_.constant()) {
        // exact: integrating a constant must not pick up quadrature roundoff
        const double c = g_.eval(0.0, 0.0);
        cached_ = kind_ == Kind::mean_g ? c : std::abs(c);
    } else if (g_.x_independent()) {
        cached_ = kind_ == Kind::mean_g ? averaged_g(g_, 0.0, order_)
                                        : averaged_g2_sqrt(g_, 0.0, order_);
    }
}

double AveragedCoeff::operator()(double x) const {
    if (cached_)
        return *cached_;
    return kind_ == Kind::mean_g ? averaged_g(g_, x, order_) : averaged_g2_sqrt(g_, x, order_);
}

double AveragedCoeff::derivative(double x, double fd_step) const {
    if (cached_)
        return 0.0;
    const double h = fd_step * (1.0 + std::abs(x));
    return ((*this)(x + h) - (*this)(x - h)) / (2.0 * h);
}

double AveragedCoeff::second_derivative(double x, double fd_step) const {
    if (cached_)
        return 0.0;
    const double h = fd_step * (1.0 + std::abs(x));
    return ((*this)(x + h) - 2.0 * (*this)(x) + (*this)(x - h)) / (h * h);
}

} // namespace fbmavg
