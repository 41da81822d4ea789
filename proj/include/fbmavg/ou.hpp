#pragma once

#include <vector>

#include "fbmavg/fbm.hpp"
#include "fbmavg/grid.hpp"
#include "fbmavg/rng.hpp"

namespace fbmavg {

/// Fast-component parameters. epsilon = 0 is a distinguished flag for the
/// limiting regime (a separate code path, never a division by zero).
struct OuParams {
    double epsilon;
    double m0;
};

bool is_limiting(const OuParams& p);

/// One exact-in-distribution OU transition over dt:
///   m' = e^{-dt/eps} m + sqrt(1 - e^{-2 dt/eps}) gamma.
/// With the epsilon = 0 flag the fast state is gamma itself.
double ou_step(double m, const OuParams& params, double dt, double gamma);

struct OuMarginal {
    double mean;
    double var;
};

/// Marginal law of the OU process at time t: N(e^{-t/eps} m0, 1 - e^{-2t/eps}).
OuMarginal ou_marginal(const OuParams& params, double t);

/// Per-step standard Gaussians gamma_n = dt^{-1/2} (B(t_{n+1}) - B(t_n)),
/// always drawn from a caller-named substream so the same sequence can be
/// replayed against different schemes.
struct GaussianSeq {
    std::vector<double> gammas;
};

GaussianSeq sample_gaussian_seq(int n, RngStream& rng);

/// i.i.d. N(0, dt) increments of a standard Brownian motion.
std::vector<double> brownian_increments(const TimeGrid& grid, RngStream& rng);

/// Standard Brownian driver path (the h = 1/2 comparison mode).
FbmPath sample_brownian_path(const TimeGrid& grid, RngStream& rng);

} // namespace fbmavg
