#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbmavg/averaging.hpp"
#include "fbmavg/expr.hpp"
#include "fbmavg/fbm.hpp"
#include "fbmavg/ou.hpp"

namespace fbmavg {

enum class Driver { fractional, brownian };

/// Full problem description for one slow-fast system
///   dX = g(X, m) dW,   dm = -(1/eps) m dt + sqrt(2/eps) dB,
/// with W a fractional Brownian motion (h > 1/2) or a standard one.
struct SystemSpec {
    CoeffExpr g;
    HurstIndex h;
    OuParams ou;
    double x0;
    Driver driver;

    SystemSpec(CoeffExpr g_, HurstIndex h_, OuParams ou_, double x0_, Driver driver_);
};

enum class SchemeKind {
    ap,
    limiting,
    averaged,
    implicit_nonap,
    brownian_ap,
    brownian_limiting,
    brownian_averaged,
};

const char* scheme_kind_name(SchemeKind kind);
bool scheme_has_fast_states(SchemeKind kind);

/// One scheme run on a shared driver path.
struct SchemeTrajectory {
    TimeGrid grid;
    SchemeKind kind;
    std::vector<double> states;                      // N+1, states[0] = x0
    std::optional<std::vector<double>> fast_states;  // N+1, ap-family kinds only
};

struct ApStep {
    double x;
    double m;
};

/// AP step: the fast state is updated first (exactly in distribution) and
/// the slow step evaluates g at the updated fast state,
///   m' = ou_step(m, gamma),  x' = x + g(x, m') dbeta.
ApStep step_ap(double x, double m, const SystemSpec& spec, double dt, double gamma, double dbeta);

/// Limiting scheme (the eps -> 0 recursion): x' = x + g(x, gamma) dbeta.
double step_limiting(double x, const SystemSpec& spec, double gamma, double dbeta);

/// Euler step of the averaged equation: x' = x + gbar(x) dbeta.
double step_averaged(double x, const AveragedCoeff& gbar, double dbeta);

/// Negative control: implicit-Euler treatment of the fast component,
/// whose eps -> 0 limit freezes m at 0 and is NOT consistent with the
/// averaged equation unless gbar(x) = g(x, 0).
ApStep step_implicit_nonap(double x, double m, const SystemSpec& spec, double dt, double gamma,
                           double dbeta);

/// Runs one full recursion against a shared driver path and gamma
/// sequence. Comparison runs must pass the SAME driver and gammas: the
/// commuting-diagram limits are coupled pathwise, so nothing is
/// re-sampled internally.
SchemeTrajectory run_scheme(const SystemSpec& spec, const FbmPath& driver,
                            const GaussianSeq& gammas, SchemeKind kind,
                            int quad_order = default_quad_order);

/// Generalized averaged scheme started at (n, x): the states
/// Xbar_{n,k}(x) for k = n..N. Flow property (bitwise):
///   averaged_flow(gbar, path, n+1, x + gbar(x)*dbeta_n) ==
///   tail of averaged_flow(gbar, path, n, x).
std::vector<double> averaged_flow(const AveragedCoeff& gbar, const FbmPath& driver, int start,
                                  double x);

/// First and second variations of the averaged flow with respect to its
/// initial state, eta_{n,n} = 1 and zeta_{n,n} = 0.
struct VariationState {
    int base;                  // n
    std::vector<double> xbar;  // k = n..N
    std::vector<double> eta;   // k = n..N
    std::vector<double> zeta;  // k = n..N
};

VariationState variation_recursion(const AveragedCoeff& gbar, const FbmPath& driver, int n,
                                   double x, double fd_step = 1e-4);

/// Named test systems; each exercises a distinct hypothesis or control:
/// an x-independent g, an x-independent g with gbar != g(.,0), a general
/// bounded-smooth g, and a constant g.
struct CatalogEntry {
    std::string name;
    std::string g;
};

const std::vector<CatalogEntry>& system_catalog();

} // namespace fbmavg
