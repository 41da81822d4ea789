#pragma once

#include <optional>
#include <vector>

#include "fbmavg/estimate.hpp"
#include "fbmavg/expr.hpp"
#include "fbmavg/rng.hpp"

namespace fbmavg {

/// Gauss-Hermite rule rescaled to the standard normal weight: for f smooth,
/// E_{m ~ N(0,1)}[f(m)] ~= sum_i weights[i] * f(nodes[i]), weights sum to 1.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached per order behind a read-mostly map; thread-safe.
const GaussHermiteRule& gauss_hermite_normal(int order);

constexpr int default_quad_order = 40;

/// gbar(x) = E_{m ~ N(0,1)}[g(x, m)] by Gauss-Hermite quadrature.
double averaged_g(const CoeffExpr& g, double x, int quad_order = default_quad_order);

/// sqrt(E_{m ~ N(0,1)}[g(x, m)^2]); >= |averaged_g| by Jensen.
double averaged_g2_sqrt(const CoeffExpr& g, double x, int quad_order = default_quad_order);

/// Plain Monte-Carlo estimate of E[g(x, m)^power], power in {1, 2};
/// independent oracle for the quadrature path.
Estimate mc_average(const CoeffExpr& g, double x, int power, int samples, RngStream& rng);

/// An averaged coefficient bound to its source expression. Evaluation is
/// on demand; the x-independent (simplified) case caches the constant.
class AveragedCoeff {
public:
    enum class Kind { mean_g, sqrt_mean_g2 };

    AveragedCoeff(CoeffExpr g, Kind kind, int quad_order = default_quad_order);

    double operator()(double x) const;

    /// First and second derivatives by central finite differences with
    /// step fd_step * (1 + |x|). The source g is a parsed expression, so
    /// no analytic derivative is available.
    double derivative(double x, double fd_step = 1e-4) const;
    double second_derivative(double x, double fd_step = 1e-4) const;

    Kind kind() const { return kind_; }
    int quad_order() const { return order_; }
    const CoeffExpr& source() const { return g_; }

private:
    CoeffExpr g_;
    Kind kind_;
    int order_;
    std::optional<double> cached_; // set when g is x-independent
};

} // namespace fbmavg
