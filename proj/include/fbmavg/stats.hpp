#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "fbmavg/estimate.hpp"
#include "fbmavg/grid.hpp"
#include "fbmavg/rng.hpp"
#include "fbmavg/schemes.hpp"

namespace fbmavg {

/// Fixed catalog of test functions. All entries except identity are
/// bounded with bounded derivatives; identity is allowed because it
/// enables exact one-step checks, but it sits outside the bounded-test-
/// function hypotheses and is flagged accordingly.
class TestFunction {
public:
    static TestFunction from_name(std::string_view name); // tanh | sin | gauss_bump | identity

    double operator()(double y) const;
    double d1(double y) const;
    double d2(double y) const;
    bool bounded() const;
    std::string_view name() const;

    static const std::vector<std::string>& catalog();

private:
    enum class Id { tanh_fn, sin_fn, gauss_bump, identity };
    explicit TestFunction(Id id) : id_(id) {}
    Id id_;
};

/// Empirical frequency of |a - b| > eta with its binomial standard error.
Estimate prob_exceed(std::span<const std::pair<double, double>> pairs, double eta);

/// A coupled comparison run: the scheme dictated by spec (ap for
/// epsilon > 0, limiting for the epsilon = 0 flag, brownian variants for
/// the brownian driver) against the averaged scheme on the same driver
/// path.
struct CoupledRunRecipe {
    SystemSpec spec;
    int quad_order = default_quad_order;
};

/// Nested Monte-Carlo estimate of E[ |E^H[phi(X_N)] - phi(Xbar_N)| ].
///
/// Conditioning on the driver sigma-field is realized by freezing the
/// driver path: for each of `outer` independent paths, Xbar_N is computed
/// once, and the inner expectation averages phi(X_N) over `inner`
/// independent gamma-sequence resamples against the same path. Outer
/// samples run in parallel; every sample derives its substreams from
/// (base seed, sample index, role), so the result is bit-identical for
/// any thread count.
Estimate conditional_criterion(const CoupledRunRecipe& recipe, const TestFunction& phi,
                               const TimeGrid& grid, int outer, int inner, const RngStream& base,
                               int threads = 0);

/// Closed-form normal reference law for weak-error comparisons.
struct NormalLaw {
    double mean;
    double var;
};

/// |mean phi(ensemble) - E[phi(reference)]|. The reference expectation is
/// Gauss-Hermite against the normal law, or the mean over a reference
/// ensemble (with pooled standard error).
Estimate weak_error(std::span<const double> ensemble, const NormalLaw& reference,
                    const TestFunction& phi, int quad_order = default_quad_order);
Estimate weak_error(std::span<const double> ensemble, std::span<const double> reference,
                    const TestFunction& phi);

/// Ordinary least squares in log-log coordinates.
struct RateFit {
    double slope;
    double intercept;
    double r_squared;
};

RateFit rate_fit(std::span<const double> dts, std::span<const double> errors);

/// Convergence study result along one axis.
struct ConvergenceReport {
    enum class Axis { dt, epsilon };
    Axis axis;
    std::vector<double> grid;      // strictly decreasing
    std::vector<Estimate> errors;  // nonnegative
    RateFit fit;
};

/// Validates the grid/error invariants and fits the log-log slope.
ConvergenceReport make_convergence_report(ConvergenceReport::Axis axis, std::vector<double> grid,
                                          std::vector<Estimate> errors);

/// Kolmogorov-Smirnov helpers for the distributional acceptance tests.
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);
double ks_statistic_vs_normal(std::vector<double> sample, double mean, double var);
/// Asymptotic p-value with the small-sample correction; n_effective is n
/// for one-sample tests and n*m/(n+m) for two-sample tests.
double ks_p_value(double d, double n_effective);

double normal_cdf(double z);

} // namespace fbmavg
