#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbmavg/fbm.hpp"
#include "fbmavg/stats.hpp"

using namespace fbmavg;

namespace {

// independent brute-force oracle for the discrete Hoelder seminorm
double holder_brute_force(const std::vector<double>& v, const TimeGrid& g, double alpha, double a,
                          double b) {
    double best = 0.0;
    for (int i = 0; i <= g.steps; ++i)
        for (int j = 0; j <= g.steps; ++j) {
            if (g.t(i) < a || g.t(j) > b || g.t(i) >= g.t(j))
                continue;
            best = std::max(best, std::abs(v[j] - v[i]) / std::pow(g.t(j) - g.t(i), alpha));
        }
    return best;
}

struct PathMoments {
    double mean_cov;  // sample covariance of (values[i], values[j])
    double se;
};

PathMoments empirical_covariance(const std::vector<FbmPath>& paths, int i, int j) {
    double si = 0, sj = 0;
    for (const auto& p : paths) {
        si += p.values[i];
        sj += p.values[j];
    }
    const double n = static_cast<double>(paths.size());
    const double mi = si / n, mj = sj / n;
    double acc = 0, acc2 = 0;
    for (const auto& p : paths) {
        const double prod = (p.values[i] - mi) * (p.values[j] - mj);
        acc += prod;
        acc2 += prod * prod;
    }
    const double cov = acc / (n - 1);
    const double var_prod = std::max(acc2 / n - (acc / n) * (acc / n), 0.0);
    return {cov, std::sqrt(var_prod / n)};
}

} // namespace

TEST_CASE("fbm covariance closed form") {
    CHECK(fbm_covariance(1.0, 1.0, HurstIndex(0.75)) == doctest::Approx(1.0).epsilon(1e-14));
    // 0.5 * (1 + 2^{1.5} - 1) = sqrt(2)
    CHECK(fbm_covariance(1.0, 2.0, HurstIndex(0.75)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(fbm_covariance(1.0, 2.0, HurstIndex(0.5)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fbm_covariance(2.0, 1.0, HurstIndex(0.75)) ==
          fbm_covariance(1.0, 2.0, HurstIndex(0.75)));
    CHECK_THROWS_AS(fbm_covariance(-1.0, 2.0, HurstIndex(0.75)), std::domain_error);
}

TEST_CASE("hurst index bounds") {
    CHECK_THROWS_AS(HurstIndex(0.3), std::invalid_argument);
    CHECK_THROWS_AS(HurstIndex(1.0), std::invalid_argument);
    CHECK(HurstIndex(0.5).value == 0.5);
}

TEST_CASE("single step variance is dt^{2H}") {
    const TimeGrid grid(1.0, 1);
    const HurstIndex h(0.75);
    RngStream rng(2024);
    const int m = 20000;
    for (bool circulant : {false, true}) {
        double sum2 = 0;
        RngStream local = rng.substream(circulant ? "circ" : "chol");
        for (int i = 0; i < m; ++i) {
            const FbmPath p =
                circulant ? sample_fbm_circulant(grid, h, local) : sample_fbm_cholesky(grid, h, local);
            sum2 += p.increments[0] * p.increments[0];
        }
        const double var = sum2 / m;
        const double se = std::sqrt(2.0 / m); // Var(z^2) = 2 for z ~ N(0,1)
        CHECK(std::abs(var - 1.0) < 3 * se);
    }
}

TEST_CASE("cholesky sampler matches the covariance formula") {
    const TimeGrid grid(1.0, 64);
    const HurstIndex h(0.75);
    CholeskyFbmSampler sampler(grid, h);
    RngStream rng(555);
    std::vector<FbmPath> paths;
    paths.reserve(20000);
    for (int i = 0; i < 20000; ++i)
        paths.push_back(sampler.sample(rng));

    const int i_half = 32, i_full = 64; // t = 0.5 and t = 1.0
    const auto [cov, se] = empirical_covariance(paths, i_half, i_full);
    const double expected = fbm_covariance(0.5, 1.0, h); // = 0.5
    CHECK(expected == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(cov - expected) < 3 * se);

    SUBCASE("path invariants") {
        for (int k = 0; k < 50; ++k) {
            CHECK(paths[k].values[0] == 0.0);
            for (int n = 0; n < grid.steps; ++n)
                CHECK(paths[k].increments[n] == paths[k].values[n + 1] - paths[k].values[n]);
        }
    }
}

TEST_CASE("cholesky guard rejects big grids") {
    CHECK_THROWS_AS(CholeskyFbmSampler(TimeGrid(1.0, 64), HurstIndex(0.75), 32),
                    std::invalid_argument);
}

TEST_CASE("cholesky at h = 0.5 gives independent N(0, dt) increments") {
    const int n = 32;
    const TimeGrid grid(1.0, n);
    CholeskyFbmSampler sampler(grid, HurstIndex(0.5));
    RngStream rng(616);
    const int m = 5000;
    const double dt = grid.dt();
    double lag_acc = 0, sum2 = 0;
    for (int i = 0; i < m; ++i) {
        const FbmPath p = sampler.sample(rng);
        sum2 += p.increments[0] * p.increments[0];
        for (int k = 0; k + 1 < n; ++k)
            lag_acc += (p.increments[k] / std::sqrt(dt)) * (p.increments[k + 1] / std::sqrt(dt));
    }
    CHECK(std::abs(sum2 / m - dt) < 3 * dt * std::sqrt(2.0 / m));
    CHECK(std::abs(lag_acc / (static_cast<double>(m) * (n - 1))) <
          3.0 / std::sqrt(static_cast<double>(n) * m));
}

TEST_CASE("circulant increments have the fGn autocovariance") {
    // dt = 1: rho(1) = (2^{2H} - 2) / 2 at H = 0.75
    const int n = 64;
    const TimeGrid grid(static_cast<double>(n), n);
    const HurstIndex h(0.75);
    CirculantFbmSampler sampler(grid, h);
    RngStream rng(808);
    const int m = 20000;
    double sum = 0, sum_sq = 0;
    for (int i = 0; i < m; ++i) {
        const FbmPath p = sampler.sample(rng);
        double acc = 0;
        for (int k = 0; k + 1 < n; ++k)
            acc += p.increments[k] * p.increments[k + 1];
        acc /= n - 1;
        sum += acc;
        sum_sq += acc * acc;
    }
    const double mean = sum / m;
    const double se = std::sqrt(std::max(sum_sq / m - mean * mean, 0.0) / m);
    const double expected = 0.5 * (std::pow(2.0, 1.5) - 2.0);
    CHECK(expected == doctest::Approx(0.41421356).epsilon(1e-7));
    CHECK(std::abs(mean - expected) < 3 * se);
}

TEST_CASE("circulant at h = 0.5 gives independent increments") {
    const int n = 128;
    const TimeGrid grid(1.0, n);
    CirculantFbmSampler sampler(grid, HurstIndex(0.5));
    RngStream rng(909);
    const int m = 2000;
    double acc = 0;
    const double dt = grid.dt();
    for (int i = 0; i < m; ++i) {
        const FbmPath p = sampler.sample(rng);
        for (int k = 0; k + 1 < n; ++k)
            acc += (p.increments[k] / std::sqrt(dt)) * (p.increments[k + 1] / std::sqrt(dt));
    }
    const double corr = acc / (m * (n - 1));
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n) * m));
}

TEST_CASE("samplers agree in law (two-sample KS at 1%)") {
    const TimeGrid grid(1.0, 256);
    const HurstIndex h(0.7);
    CholeskyFbmSampler chol(grid, h);
    CirculantFbmSampler circ(grid, h);
    RngStream rng(31337);
    RngStream r1 = rng.substream("a"), r2 = rng.substream("b");
    const int m = 5000;
    std::vector<double> terminal_a, terminal_b, mid_a, mid_b;
    for (int i = 0; i < m; ++i) {
        const FbmPath pa = chol.sample(r1);
        const FbmPath pb = circ.sample(r2);
        terminal_a.push_back(pa.values.back());
        terminal_b.push_back(pb.values.back());
        mid_a.push_back(pa.values[64]);
        mid_b.push_back(pb.values[64]);
    }
    const double n_eff = m * static_cast<double>(m) / (2.0 * m);
    CHECK(ks_p_value(ks_statistic_two_sample(terminal_a, terminal_b), n_eff) >= 0.01);
    CHECK(ks_p_value(ks_statistic_two_sample(mid_a, mid_b), n_eff) >= 0.01);
}

TEST_CASE("increment stationarity") {
    const TimeGrid grid(1.0, 16);
    const HurstIndex h(0.7);
    CirculantFbmSampler sampler(grid, h);
    RngStream rng(4242);
    const int m = 20000;
    std::vector<FbmPath> paths;
    paths.reserve(m);
    for (int i = 0; i < m; ++i)
        paths.push_back(sampler.sample(rng));

    const int lag = 2;
    const double expected = std::pow(lag * grid.dt(), 2 * h.value);
    for (int n : {0, 5, 11}) {
        double sum2 = 0;
        for (const auto& p : paths) {
            const double d = p.values[n + lag] - p.values[n];
            sum2 += d * d;
        }
        const double var = sum2 / m;
        const double se = expected * std::sqrt(2.0 / m);
        CHECK(std::abs(var - expected) < 3 * se);
    }
}

TEST_CASE("holder seminorm on small grids") {
    const TimeGrid grid(1.0, 2);
    SUBCASE("constant") {
        std::vector<double> v{3.0, 3.0, 3.0};
        CHECK(holder_seminorm(v, grid, 0.5, 0.0, 1.0) == 0.0);
    }
    SUBCASE("linear") {
        std::vector<double> v{0.0, 0.5, 1.0};
        const double got = holder_seminorm(v, grid, 0.5, 0.0, 1.0);
        CHECK(got == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(got == doctest::Approx(holder_brute_force(v, grid, 0.5, 0.0, 1.0)));
    }
    SUBCASE("tent") {
        std::vector<double> v{0.0, 1.0, 0.0};
        const double got = holder_seminorm(v, grid, 0.5, 0.0, 1.0);
        CHECK(got == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(got == doctest::Approx(holder_brute_force(v, grid, 0.5, 0.0, 1.0)));
    }
    SUBCASE("anchored flag coincides on grid signals") {
        std::vector<double> v{0.0, 1.0, 0.25};
        CHECK(holder_seminorm(v, grid, 0.6, 0.0, 1.0, false) ==
              holder_seminorm(v, grid, 0.6, 0.0, 1.0, true));
    }
    SUBCASE("window restriction") {
        std::vector<double> v{0.0, 1.0, 0.0};
        const double got = holder_seminorm(v, grid, 0.5, 0.5, 1.0);
        CHECK(got == doctest::Approx(holder_brute_force(v, grid, 0.5, 0.5, 1.0)));
    }
    SUBCASE("argument validation") {
        std::vector<double> v{0.0, 1.0, 0.0};
        CHECK_THROWS_AS(holder_seminorm(v, grid, 1.5, 0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(holder_seminorm(v, grid, 0.5, 0.8, 0.2), std::invalid_argument);
    }
    SUBCASE("window with no grid pair gives 0 by convention") {
        std::vector<double> v{0.0, 1.0, 0.0};
        CHECK(holder_seminorm(v, grid, 0.5, 0.1, 0.4) == 0.0);
    }
}

TEST_CASE("holder seminorm agrees with brute force on sampled paths") {
    const TimeGrid grid(1.0, 32);
    CirculantFbmSampler sampler(grid, HurstIndex(0.75));
    RngStream rng(99);
    for (int i = 0; i < 5; ++i) {
        const FbmPath p = sampler.sample(rng);
        CHECK(holder_seminorm(p.values, grid, 0.6, 0.0, 1.0) ==
              doctest::Approx(holder_brute_force(p.values, grid, 0.6, 0.0, 1.0)));
    }
}

TEST_CASE("empirical holder bound is stable under refinement") {
    const HurstIndex h(0.75);
    const double alpha = 0.6;
    RngStream rng(777);
    double means[2] = {0.0, 0.0};
    const int m = 200;
    int idx = 0;
    for (int n : {64, 128}) {
        const TimeGrid grid(1.0, n);
        CirculantFbmSampler sampler(grid, h);
        double acc = 0;
        for (int i = 0; i < m; ++i) {
            const FbmPath p = sampler.sample(rng);
            acc += holder_seminorm(p.values, grid, alpha, 0.0, 1.0);
        }
        means[idx++] = acc / m;
    }
    CHECK(std::abs(means[1] - means[0]) / means[0] < 0.2);
}

TEST_CASE("coarsen_path restricts to the coarse grid") {
    const TimeGrid grid(1.0, 8);
    RngStream rng(5);
    const FbmPath fine = sample_fbm_circulant(grid, HurstIndex(0.75), rng);
    const FbmPath coarse = coarsen_path(fine, 2);
    CHECK(coarse.grid.steps == 4);
    for (int k = 0; k <= 4; ++k)
        CHECK(coarse.values[k] == fine.values[2 * k]);
    CHECK_THROWS_AS(coarsen_path(fine, 3), std::invalid_argument);
}
