#pragma once

#include <stdexcept>

namespace fbmavg {

/// Uniform grid t_n = n*dt on [0, T] with T = N*dt.
struct TimeGrid {
    double horizon; // T
    int steps;      // N

    TimeGrid(double T, int N) : horizon(T), steps(N) {
        if (!(T > 0.0))
            throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (N < 1)
            throw std::invalid_argument("TimeGrid: step count must be >= 1");
    }

    double dt() const { return horizon / steps; }

    /// t(0) = 0 and t(N) = T exactly.
    double t(int n) const { return n == steps ? horizon : n * dt(); }

    bool operator==(const TimeGrid&) const = default;
};

} // namespace fbmavg
