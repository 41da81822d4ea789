#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fbmavg/grid.hpp"
#include "fbmavg/rng.hpp"

namespace fbmavg {

/// Hurst index; 0.5 <= h < 1 (h = 0.5 is the standard Brownian case used
/// by the driver comparison mode, the averaging theory needs h > 0.5).
struct HurstIndex {
    double value;

    explicit HurstIndex(double h) : value(h) {
        if (!(h >= 0.5 && h < 1.0))
            throw std::invalid_argument("HurstIndex: require 0.5 <= h < 1");
    }
};

/// Covariance R(t,s) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2 of fBm.
double fbm_covariance(double t, double s, HurstIndex h);

/// One driver trajectory on a uniform grid. values[0] = 0 and
/// increments[n] = values[n+1] - values[n].
struct FbmPath {
    TimeGrid grid;
    std::vector<double> values;     // N+1
    std::vector<double> increments; // N
};

/// Builds a path from its increments (values by cumulative sum).
FbmPath path_from_increments(const TimeGrid& grid, std::vector<double> increments);

/// Restriction of a path to every `stride`-th grid point. Used to couple
/// runs across dt refinements: the coarse path is the fine path seen on
/// the coarse grid.
FbmPath coarsen_path(const FbmPath& fine, int stride);

/// Thrown when a sampler's linear algebra breaks down.
struct SamplerNumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact O(N^3) reference sampler via Cholesky factorization of the full
/// value covariance matrix.
class CholeskyFbmSampler {
public:
    static constexpr int default_max_n = 4096;

    CholeskyFbmSampler(TimeGrid grid, HurstIndex h, int max_n = default_max_n);

    FbmPath sample(RngStream& rng) const;

    const TimeGrid& grid() const { return grid_; }

private:
    TimeGrid grid_;
    HurstIndex h_;
    std::vector<double> chol_; // packed lower triangle, N rows
};

/// Exact O(N log N) sampler via circulant embedding of the increment
/// autocovariance (Davies-Harte). Default generator for Monte-Carlo runs.
class CirculantFbmSampler {
public:
    CirculantFbmSampler(TimeGrid grid, HurstIndex h, int max_doublings = 8);
    ~CirculantFbmSampler();

    CirculantFbmSampler(const CirculantFbmSampler&) = delete;
    CirculantFbmSampler& operator=(const CirculantFbmSampler&) = delete;

    /// Thread-safe: concurrent calls are fine as long as each caller owns
    /// its RngStream.
    FbmPath sample(RngStream& rng) const;

    const TimeGrid& grid() const { return grid_; }
    int embedding_size() const { return embedding_; }

private:
    TimeGrid grid_;
    HurstIndex h_;
    int embedding_;                  // 2m >= 2N
    std::vector<double> spectrum_;   // sqrt(lambda_j / L) scaling factors
    struct Plan;
    std::unique_ptr<Plan> plan_;
};

/// Convenience one-shot samplers.
FbmPath sample_fbm_cholesky(const TimeGrid& grid, HurstIndex h, RngStream& rng);
FbmPath sample_fbm_circulant(const TimeGrid& grid, HurstIndex h, RngStream& rng);

/// Discrete alpha-Hoelder seminorm of grid values over [a, b]:
/// sup |f(t2)-f(t1)| / (t2-t1)^alpha over grid pairs t1 < t2 in [a, b].
/// `anchored` restricts t1 to grid points; on a pure grid signal both
/// variants coincide (the flag matters for piecewise-constant extensions).
/// An empty pair set gives 0.
double holder_seminorm(std::span<const double> values, const TimeGrid& grid,
                       double alpha, double a, double b, bool anchored = false);

} // namespace fbmavg
