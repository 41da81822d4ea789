#include "fbmavg/schemes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fbmavg {

SystemSpec::SystemSpec(CoeffExpr g_, HurstIndex h_, OuParams ou_, double x0_, Driver driver_)
    : g(std::move(g_)), h(h_), ou(ou_), x0(x0_), driver(driver_) {
    if (driver == Driver::fractional && !(h.value > 0.5))
        throw std::invalid_argument("SystemSpec: the fractional driver requires h > 0.5");
    if (!(ou.epsilon >= 0.0 && ou.epsilon <= 1.0))
        throw std::invalid_argument("SystemSpec: epsilon must lie in (0, 1] or be the 0 flag");
}

const char* scheme_kind_name(SchemeKind kind) {
    switch (kind) {
    case SchemeKind::ap: return "ap";
    case SchemeKind::limiting: return "limiting";
    case SchemeKind::averaged: return "averaged";
    case SchemeKind::implicit_nonap: return "implicit_nonap";
    case SchemeKind::brownian_ap: return "brownian_ap";
    case SchemeKind::brownian_limiting: return "brownian_limiting";
    case SchemeKind::brownian_averaged: return "brownian_averaged";
    }
    return "?";
}

bool scheme_has_fast_states(SchemeKind kind) {
    return kind == SchemeKind::ap || kind == SchemeKind::implicit_nonap ||
           kind == SchemeKind::brownian_ap;
}

namespace {

bool is_brownian_kind(SchemeKind kind) {
    return kind == SchemeKind::brownian_ap || kind == SchemeKind::brownian_limiting ||
           kind == SchemeKind::brownian_averaged;
}

[[noreturn]] void step_error(const char* kind, int step, const EvalError& e) {
    std::ostringstream msg;
    msg << kind << " scheme failed at step " << step << ": " << e.what();
    throw EvalError(msg.str(), e.subexpr);
}

} // namespace

ApStep step_ap(double x, double m, const SystemSpec& spec, double dt, double gamma, double dbeta) {
    const double m_next = ou_step(m, spec.ou, dt, gamma);
    return ApStep{x + spec.g.eval(x, m_next) * dbeta, m_next};
}

double step_limiting(double x, const SystemSpec& spec, double gamma, double dbeta) {
    return x + spec.g.eval(x, gamma) * dbeta;
}

double step_averaged(double x, const AveragedCoeff& gbar, double dbeta) {
    return x + gbar(x) * dbeta;
}

ApStep step_implicit_nonap(double x, double m, const SystemSpec& spec, double dt, double gamma,
                           double dbeta) {
    double m_next;
    if (is_limiting(spec.ou)) {
        m_next = 0.0;
    } else {
        const double r = dt / spec.ou.epsilon;
        m_next = (m + std::sqrt(r) * gamma) / (1.0 + r);
    }
    return ApStep{x + spec.g.eval(x, m_next) * dbeta, m_next};
}

SchemeTrajectory run_scheme(const SystemSpec& spec, const FbmPath& driver,
                            const GaussianSeq& gammas, SchemeKind kind, int quad_order) {
    const TimeGrid& grid = driver.grid;
    const int n_steps = grid.steps;
    if (static_cast<int>(gammas.gammas.size()) != n_steps)
        throw std::invalid_argument("run_scheme: gamma sequence and driver grid disagree");
    if (is_brownian_kind(kind) != (spec.driver == Driver::brownian))
        throw std::invalid_argument("run_scheme: scheme kind does not match the spec's driver");

    SchemeTrajectory traj{grid, kind, std::vector<double>(n_steps + 1), std::nullopt};
    traj.states[0] = spec.x0;
    const double dt = grid.dt();

    switch (kind) {
    case SchemeKind::ap:
    case SchemeKind::brownian_ap: {
        std::vector<double> fast(n_steps + 1);
        fast[0] = spec.ou.m0;
        for (int n = 0; n < n_steps; ++n) {
            try {
                const ApStep s = step_ap(traj.states[n], fast[n], spec, dt, gammas.gammas[n],
                                         driver.increments[n]);
                traj.states[n + 1] = s.x;
                fast[n + 1] = s.m;
            } catch (const EvalError& e) {
                step_error("ap", n, e);
            }
        }
        traj.fast_states = std::move(fast);
        break;
    }
    case SchemeKind::limiting:
    case SchemeKind::brownian_limiting: {
        for (int n = 0; n < n_steps; ++n) {
            try {
                traj.states[n + 1] =
                    step_limiting(traj.states[n], spec, gammas.gammas[n], driver.increments[n]);
            } catch (const EvalError& e) {
                step_error("limiting", n, e);
            }
        }
        break;
    }
    case SchemeKind::averaged:
    case SchemeKind::brownian_averaged: {
        // gbar for the fractional driver, sqrt of g^2-bar for the standard one
        const AveragedCoeff gbar(spec.g,
                                 spec.driver == Driver::fractional
                                     ? AveragedCoeff::Kind::mean_g
                                     : AveragedCoeff::Kind::sqrt_mean_g2,
                                 quad_order);
        for (int n = 0; n < n_steps; ++n) {
            try {
                traj.states[n + 1] = step_averaged(traj.states[n], gbar, driver.increments[n]);
            } catch (const EvalError& e) {
                step_error("averaged", n, e);
            }
        }
        break;
    }
    case SchemeKind::implicit_nonap: {
        std::vector<double> fast(n_steps + 1);
        fast[0] = spec.ou.m0;
        for (int n = 0; n < n_steps; ++n) {
            try {
                const ApStep s = step_implicit_nonap(traj.states[n], fast[n], spec, dt,
                                                     gammas.gammas[n], driver.increments[n]);
                traj.states[n + 1] = s.x;
                fast[n + 1] = s.m;
            } catch (const EvalError& e) {
                step_error("implicit_nonap", n, e);
            }
        }
        traj.fast_states = std::move(fast);
        break;
    }
    }
    return traj;
}

std::vector<double> averaged_flow(const AveragedCoeff& gbar, const FbmPath& driver, int start,
                                  double x) {
    const int n_steps = driver.grid.steps;
    if (start < 0 || start > n_steps)
        throw std::invalid_argument("averaged_flow: start index out of range");
    std::vector<double> states(n_steps - start + 1);
    states[0] = x;
    for (int k = start; k < n_steps; ++k)
        states[k - start + 1] = states[k - start] + gbar(states[k - start]) * driver.increments[k];
    return states;
}

VariationState variation_recursion(const AveragedCoeff& gbar, const FbmPath& driver, int n,
                                   double x, double fd_step) {
    const int n_steps = driver.grid.steps;
    if (n < 0 || n > n_steps)
        throw std::invalid_argument("variation_recursion: base index out of range");

    VariationState st;
    st.base = n;
    const int len = n_steps - n + 1;
    st.xbar.resize(len);
    st.eta.resize(len);
    st.zeta.resize(len);
    st.xbar[0] = x;
    st.eta[0] = 1.0;
    st.zeta[0] = 0.0;

    for (int k = n; k < n_steps; ++k) {
        const int i = k - n;
        const double y = st.xbar[i];
        const double db = driver.increments[k];
        const double d1 = gbar.derivative(y, fd_step);
        const double d2 = gbar.second_derivative(y, fd_step);
        st.xbar[i + 1] = y + gbar(y) * db;
        st.eta[i + 1] = st.eta[i] + d1 * st.eta[i] * db;
        st.zeta[i + 1] = st.zeta[i] + d1 * st.zeta[i] * db + d2 * st.eta[i] * st.eta[i] * db;
    }
    return st;
}

const std::vector<CatalogEntry>& system_catalog() {
    static const std::vector<CatalogEntry> entries{
        {"simplified_cos", "cos(m)"},
        {"simplified_shifted", "cos(m)+m^2"},
        {"general_bounded", "tanh(x)*cos(m)+sin(x)"},
        {"constant", "1.5"},
    };
    return entries;
}

} // namespace fbmavg
