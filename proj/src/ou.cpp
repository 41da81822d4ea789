#include "fbmavg/ou.hpp"

#include <cmath>
#include <stdexcept>

namespace fbmavg {

bool is_limiting(const OuParams& p) {
    return p.epsilon == 0.0;
}

double ou_step(double m, const OuParams& params, double dt, double gamma) {
    if (is_limiting(params))
        return gamma;
    if (!(dt > 0.0))
        throw std::invalid_argument("ou_step: dt must be positive");
    if (!(params.epsilon > 0.0))
        throw std::invalid_argument("ou_step: epsilon must be positive (or the 0 flag)");
    const double decay = std::exp(-dt / params.epsilon);
    return decay * m + std::sqrt(1.0 - decay * decay) * gamma;
}

OuMarginal ou_marginal(const OuParams& params, double t) {
    if (!(params.epsilon > 0.0))
        throw std::domain_error("ou_marginal: epsilon must be positive");
    if (t < 0.0)
        throw std::domain_error("ou_marginal: time must be nonnegative");
    const double decay = std::exp(-t / params.epsilon);
    return OuMarginal{decay * params.m0, 1.0 - decay * decay};
}

GaussianSeq sample_gaussian_seq(int n, RngStream& rng) {
    GaussianSeq seq;
    seq.gammas.resize(n);
    for (double& g : seq.gammas)
        g = rng.gaussian();
    return seq;
}

std::vector<double> brownian_increments(const TimeGrid& grid, RngStream& rng) {
    const double scale = std::sqrt(grid.dt());
    std::vector<double> incs(grid.steps);
    for (double& d : incs)
        d = scale * rng.gaussian();
    return incs;
}

FbmPath sample_brownian_path(const TimeGrid& grid, RngStream& rng) {
    return path_from_increments(grid, brownian_increments(grid, rng));
}

} // namespace fbmavg
