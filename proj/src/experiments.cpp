#include "fbmavg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <optional>

#include "fbmavg/csv.hpp"
#include "fbmavg/parallel.hpp"
#include "fbmavg/stats.hpp"

namespace fbmavg {

namespace {

namespace fs = std::filesystem;

std::string hex_u64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::pair<std::string, std::string>> standard_metadata(const ExperimentConfig& cfg) {
    return {
        {"experiment", experiment_kind_name(*cfg.kind)},
        {"version", project_version},
        {"config_hash", hex_u64(cfg.config_hash)},
        {"seed", std::to_string(cfg.base_seed)},
        {"generated", utc_now()},
    };
}

std::string write_table(const ExperimentConfig& cfg, ResultTable table, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    const std::string path = (fs::path(cfg.out_dir) / (name + ".csv")).string();
    table.metadata = standard_metadata(cfg);
    write_csv(table, path);
    return path;
}

FbmPath sample_driver(const ExperimentConfig& cfg, const TimeGrid& grid,
                      const CirculantFbmSampler* sampler, RngStream& rng) {
    if (cfg.driver == Driver::brownian)
        return sample_brownian_path(grid, rng);
    return sampler->sample(rng);
}

SchemeKind ap_kind(Driver d) {
    return d == Driver::brownian ? SchemeKind::brownian_ap : SchemeKind::ap;
}
SchemeKind limiting_kind(Driver d) {
    return d == Driver::brownian ? SchemeKind::brownian_limiting : SchemeKind::limiting;
}
SchemeKind averaged_kind(Driver d) {
    return d == Driver::brownian ? SchemeKind::brownian_averaged : SchemeKind::averaged;
}

Estimate mean_and_se(const std::vector<double>& xs) {
    double sum = 0.0, sum_sq = 0.0;
    for (double v : xs) {
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0);
    return Estimate{mean, std::sqrt(var / n)};
}

// Step counts sorted ascending; every count must divide the finest one so
// that runs can be coupled by path coarsening.
std::vector<int> coupled_step_counts(const ExperimentConfig& cfg) {
    std::vector<int> ns = cfg.step_counts;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (int n : ns)
        if (ns.back() % n != 0)
            throw ConfigError("[grid] N_list: every N must divide the largest N (coupled "
                              "refinement), got " + std::to_string(n) + " vs " +
                              std::to_string(ns.back()));
    return ns;
}

std::vector<std::string> run_simulate(const ExperimentConfig& cfg) {
    const TimeGrid grid(cfg.horizon, cfg.step_counts.front());
    const SystemSpec spec = cfg.make_system(cfg.epsilons.front());
    RngStream base(cfg.base_seed);

    std::optional<CirculantFbmSampler> sampler;
    if (cfg.driver == Driver::fractional)
        sampler.emplace(grid, spec.h);
    RngStream driver_rng = base.substream("driver");
    const FbmPath path = sample_driver(cfg, grid, sampler ? &*sampler : nullptr, driver_rng);
    RngStream gamma_rng = base.substream("gamma");
    const GaussianSeq gammas = sample_gaussian_seq(grid.steps, gamma_rng);

    const SchemeTrajectory ap = run_scheme(spec, path, gammas, ap_kind(cfg.driver), cfg.quad_order);
    const SchemeTrajectory lim =
        run_scheme(spec, path, gammas, limiting_kind(cfg.driver), cfg.quad_order);
    const SchemeTrajectory avg =
        run_scheme(spec, path, gammas, averaged_kind(cfg.driver), cfg.quad_order);

    ResultTable table;
    table.columns = {"n", "t", "beta", "m", "X_ap", "X_limiting", "X_averaged"};
    for (int n = 0; n <= grid.steps; ++n)
        table.add_row({static_cast<std::int64_t>(n), grid.t(n), path.values[n],
                       (*ap.fast_states)[n], ap.states[n], lim.states[n], avg.states[n]});
    return {write_table(cfg, std::move(table), "simulate")};
}

std::vector<std::string> run_rate_fit(const ExperimentConfig& cfg) {
    if (cfg.step_counts.size() < 3)
        throw ConfigError("[grid] N_list: rate-fit needs at least 3 step counts");
    const TestFunction phi = TestFunction::from_name(cfg.phi);
    const CoupledRunRecipe recipe{cfg.make_system(cfg.epsilons.front()), cfg.quad_order};
    RngStream base(cfg.base_seed);

    std::vector<int> ns = cfg.step_counts;
    std::sort(ns.begin(), ns.end()); // coarse (large dt) first in the table below

    std::vector<double> dts;
    std::vector<Estimate> estimates;
    for (int n : ns) {
        const TimeGrid grid(cfg.horizon, n);
        estimates.push_back(
            conditional_criterion(recipe, phi, grid, cfg.outer, cfg.inner,
                                  base.substream("rate").substream(static_cast<std::uint64_t>(n)),
                                  cfg.threads));
        dts.push_back(grid.dt());
    }
    const ConvergenceReport report =
        make_convergence_report(ConvergenceReport::Axis::dt, std::move(dts), std::move(estimates));

    ResultTable table;
    table.columns = {"dt", "error", "std_error"};
    for (std::size_t i = 0; i < report.grid.size(); ++i)
        table.add_row({report.grid[i], report.errors[i].value, report.errors[i].std_error});
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", report.fit.slope);
    table.footer.emplace_back("slope", buf);
    std::snprintf(buf, sizeof buf, "%.17g", report.fit.intercept);
    table.footer.emplace_back("intercept", buf);
    std::snprintf(buf, sizeof buf, "%.17g", report.fit.r_squared);
    table.footer.emplace_back("r2", buf);
    return {write_table(cfg, std::move(table), "rate_fit")};
}

std::vector<std::string> run_ap_diagram(const ExperimentConfig& cfg) {
    if (cfg.driver != Driver::fractional)
        throw ConfigError("[system] driver: ap-diagram is the fractional-driver experiment");
    const std::vector<int> ns = coupled_step_counts(cfg);
    const int n_fine = ns.back();
    std::vector<double> eps = cfg.epsilons;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    const TestFunction phi = TestFunction::from_name(cfg.phi);
    const TimeGrid fine_grid(cfg.horizon, n_fine);
    const CirculantFbmSampler sampler(fine_grid, HurstIndex(cfg.h));
    RngStream base = RngStream(cfg.base_seed).substream("diagram");

    // diffs[point][outer sample]; points are dt-curve entries then eps-curve entries
    const std::size_t dt_points = ns.size(), eps_points = eps.size();
    std::vector<std::vector<double>> dt_diffs(dt_points, std::vector<double>(cfg.outer));
    std::vector<std::vector<double>> eps_diffs(eps_points, std::vector<double>(cfg.outer));

    parallel_for(cfg.outer, cfg.threads, [&](int i) {
        RngStream s = base.substream(static_cast<std::uint64_t>(i));
        RngStream driver_rng = s.substream("driver");
        const FbmPath fine_path = sampler.sample(driver_rng);

        // eps -> 0 first: the limiting scheme across the dt grid, against
        // the averaged scheme on the same (coarsened) path
        for (std::size_t k = 0; k < dt_points; ++k) {
            const int n = ns[k];
            const FbmPath path = n == n_fine ? fine_path : coarsen_path(fine_path, n_fine / n);
            const SystemSpec limiting_spec = cfg.make_system(0.0);
            const GaussianSeq zeros{std::vector<double>(n, 0.0)};
            const SchemeTrajectory avg =
                run_scheme(limiting_spec, path, zeros, SchemeKind::averaged, cfg.quad_order);
            const double ref = phi(avg.states.back());

            RngStream gamma_base = s.substream("gamma").substream(static_cast<std::uint64_t>(n));
            double acc = 0.0;
            for (int j = 0; j < cfg.inner; ++j) {
                RngStream gamma_rng = gamma_base.substream(static_cast<std::uint64_t>(j));
                const GaussianSeq gammas = sample_gaussian_seq(n, gamma_rng);
                const SchemeTrajectory traj =
                    run_scheme(limiting_spec, path, gammas, SchemeKind::limiting, cfg.quad_order);
                acc += phi(traj.states.back()) - ref;
            }
            dt_diffs[k][i] = std::abs(acc / cfg.inner);
        }

        // dt -> 0 first: the AP scheme at the finest dt across the eps
        // grid, with gamma sequences shared across eps (coupled limits)
        {
            const GaussianSeq zeros{std::vector<double>(n_fine, 0.0)};
            const SchemeTrajectory avg = run_scheme(cfg.make_system(0.0), fine_path, zeros,
                                                    SchemeKind::averaged, cfg.quad_order);
            const double ref = phi(avg.states.back());

            std::vector<SystemSpec> specs;
            specs.reserve(eps_points);
            for (double e : eps)
                specs.push_back(cfg.make_system(e));

            std::vector<double> acc(eps_points, 0.0);
            RngStream gamma_base =
                s.substream("gamma").substream(static_cast<std::uint64_t>(n_fine));
            for (int j = 0; j < cfg.inner; ++j) {
                RngStream gamma_rng = gamma_base.substream(static_cast<std::uint64_t>(j));
                const GaussianSeq gammas = sample_gaussian_seq(n_fine, gamma_rng);
                for (std::size_t k = 0; k < eps_points; ++k) {
                    const SchemeKind kind =
                        eps[k] == 0.0 ? SchemeKind::limiting : SchemeKind::ap;
                    const SchemeTrajectory traj =
                        run_scheme(specs[k], fine_path, gammas, kind, cfg.quad_order);
                    acc[k] += phi(traj.states.back()) - ref;
                }
            }
            for (std::size_t k = 0; k < eps_points; ++k)
                eps_diffs[k][i] = std::abs(acc[k] / cfg.inner);
        }
    });

    ResultTable table;
    table.columns = {"epsilon", "dt", "error", "std_error", "order_tag"};
    for (std::size_t k = 0; k < dt_points; ++k) { // ns ascending = coarse dt first
        const double dt = cfg.horizon / ns[k];
        const Estimate est = mean_and_se(dt_diffs[k]);
        table.add_row({0.0, dt, est.value, est.std_error, std::string("eps_first")});
    }
    const double dt_fine = cfg.horizon / n_fine;
    for (std::size_t k = 0; k < eps_points; ++k) {
        const Estimate est = mean_and_se(eps_diffs[k]);
        table.add_row({eps[k], dt_fine, est.value, est.std_error, std::string("dt_first")});
    }
    return {write_table(cfg, std::move(table), "ap_diagram")};
}

std::vector<std::string> run_eps_sweep(const ExperimentConfig& cfg) {
    const TimeGrid grid(cfg.horizon, cfg.step_counts.front());
    RngStream base = RngStream(cfg.base_seed).substream("sweep");
    std::optional<CirculantFbmSampler> sampler;
    if (cfg.driver == Driver::fractional)
        sampler.emplace(grid, HurstIndex(cfg.h));

    std::vector<double> eps = cfg.epsilons;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    std::vector<SystemSpec> specs;
    specs.reserve(eps.size());
    for (double e : eps)
        specs.push_back(cfg.make_system(e));
    const SystemSpec limiting_spec = cfg.make_system(0.0);

    std::vector<std::vector<double>> gaps(eps.size(), std::vector<double>(cfg.outer));
    parallel_for(cfg.outer, cfg.threads, [&](int i) {
        RngStream s = base.substream(static_cast<std::uint64_t>(i));
        RngStream driver_rng = s.substream("driver");
        const FbmPath path = sample_driver(cfg, grid, sampler ? &*sampler : nullptr, driver_rng);
        RngStream gamma_rng = s.substream("gamma");
        const GaussianSeq gammas = sample_gaussian_seq(grid.steps, gamma_rng);

        const SchemeTrajectory lim =
            run_scheme(limiting_spec, path, gammas, limiting_kind(cfg.driver), cfg.quad_order);
        for (std::size_t k = 0; k < eps.size(); ++k) {
            const SchemeTrajectory traj = run_scheme(
                specs[k], path, gammas,
                eps[k] == 0.0 ? limiting_kind(cfg.driver) : ap_kind(cfg.driver), cfg.quad_order);
            gaps[k][i] = std::abs(traj.states.back() - lim.states.back());
        }
    });

    ResultTable table;
    table.columns = {"epsilon", "terminal_gap_mean", "terminal_gap_se"};
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const Estimate est = mean_and_se(gaps[k]);
        table.add_row({eps[k], est.value, est.std_error});
    }
    return {write_table(cfg, std::move(table), "eps_sweep")};
}

std::vector<std::string> run_brownian_compare(const ExperimentConfig& cfg) {
    if (cfg.driver != Driver::brownian)
        throw ConfigError("[system] driver: brownian-compare requires driver = brownian");
    if (!cfg.g->x_independent())
        throw ConfigError("[system] g: brownian-compare uses the simplified case; g must not "
                          "depend on x");

    const double g2bar_sqrt = averaged_g2_sqrt(*cfg.g, 0.0, cfg.quad_order);
    std::vector<int> ns = cfg.step_counts;
    std::sort(ns.begin(), ns.end());
    RngStream base = RngStream(cfg.base_seed).substream("brownian");

    ResultTable summary;
    summary.columns = {"dt", "var_x", "var_x_se", "var_ref", "ks_stat", "ks_p"};
    ResultTable exceed;
    exceed.columns = {"dt", "eta", "p_exceed", "p_exceed_se"};

    for (int n : ns) {
        const TimeGrid grid(cfg.horizon, n);
        const SystemSpec spec = cfg.make_system(0.0);
        std::vector<double> terminal(cfg.outer);
        std::vector<std::pair<double, double>> pairs(cfg.outer);

        parallel_for(cfg.outer, cfg.threads, [&](int i) {
            RngStream s = base.substream(static_cast<std::uint64_t>(n))
                              .substream(static_cast<std::uint64_t>(i));
            RngStream driver_rng = s.substream("driver");
            const FbmPath path = sample_brownian_path(grid, driver_rng);
            RngStream gamma_rng = s.substream("gamma");
            const GaussianSeq gammas = sample_gaussian_seq(grid.steps, gamma_rng);

            const SchemeTrajectory lim =
                run_scheme(spec, path, gammas, SchemeKind::brownian_limiting, cfg.quad_order);
            // the simplified averaged limit is exactly x0 + sqrt(g2bar) * beta(T)
            const double averaged_terminal = cfg.x0 + g2bar_sqrt * path.values.back();
            terminal[i] = lim.states.back();
            pairs[i] = {lim.states.back(), averaged_terminal};
        });

        double sum = 0.0, sum_sq = 0.0;
        for (double v : terminal) {
            sum += v;
            sum_sq += v * v;
        }
        const double m = static_cast<double>(cfg.outer);
        const double mean = sum / m;
        const double var = (sum_sq - m * mean * mean) / (m - 1.0);
        const double var_se = var * std::sqrt(2.0 / (m - 1.0));
        const double var_ref = g2bar_sqrt * g2bar_sqrt * cfg.horizon;

        const double ks = ks_statistic_vs_normal(terminal, cfg.x0, var_ref);
        summary.add_row({grid.dt(), var, var_se, var_ref, ks, ks_p_value(ks, m)});

        for (double eta : cfg.etas) {
            const Estimate p = prob_exceed(pairs, eta);
            exceed.add_row({grid.dt(), eta, p.value, p.std_error});
        }
    }

    return {write_table(cfg, std::move(summary), "brownian_compare"),
            write_table(cfg, std::move(exceed), "brownian_exceed")};
}

std::vector<std::string> run_variation_diag(const ExperimentConfig& cfg) {
    if (cfg.driver != Driver::fractional)
        throw ConfigError("[system] driver: variation-diag requires the fractional driver");
    const std::vector<int> ns = coupled_step_counts(cfg);
    const int n_fine = ns.back();
    const TimeGrid fine_grid(cfg.horizon, n_fine);
    const CirculantFbmSampler sampler(fine_grid, HurstIndex(cfg.h));
    const AveragedCoeff gbar(*cfg.g, AveragedCoeff::Kind::mean_g, cfg.quad_order);
    static constexpr double x_grid[] = {-2.0, -1.0, 0.0, 1.0, 2.0};

    RngStream base = RngStream(cfg.base_seed).substream("variation");
    std::vector<FbmPath> fine_paths;
    fine_paths.reserve(cfg.paths);
    for (int p = 0; p < cfg.paths; ++p) {
        RngStream rng = base.substream(static_cast<std::uint64_t>(p));
        fine_paths.push_back(sampler.sample(rng));
    }

    ResultTable table;
    table.columns = {"dt", "n", "sup_eta", "sup_zeta"};
    for (int n_steps : ns) {
        std::vector<FbmPath> paths;
        paths.reserve(cfg.paths);
        for (const FbmPath& fine : fine_paths)
            paths.push_back(n_steps == n_fine ? fine : coarsen_path(fine, n_fine / n_steps));

        std::vector<double> sup_eta(n_steps + 1), sup_zeta(n_steps + 1);
        parallel_for(n_steps + 1, cfg.threads, [&](int n) {
            double best_eta = 0.0, best_zeta = 0.0;
            for (const FbmPath& path : paths) {
                for (double x : x_grid) {
                    const VariationState st = variation_recursion(gbar, path, n, x, cfg.fd_step);
                    best_eta = std::max(best_eta, std::abs(st.eta.back()));
                    best_zeta = std::max(best_zeta, std::abs(st.zeta.back()));
                }
            }
            sup_eta[n] = best_eta;
            sup_zeta[n] = best_zeta;
        });

        const double dt = cfg.horizon / n_steps;
        for (int n = 0; n <= n_steps; ++n)
            table.add_row({dt, static_cast<std::int64_t>(n), sup_eta[n], sup_zeta[n]});
    }
    return {write_table(cfg, std::move(table), "variation_diag")};
}

} // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
    if (!cfg.kind)
        throw ConfigError("no experiment kind selected (config [experiment] kind or CLI "
                          "subcommand)");
    if (!cfg.g)
        throw ConfigError("[system] g: missing coefficient expression");
    switch (*cfg.kind) {
    case ExperimentKind::simulate: return run_simulate(cfg);
    case ExperimentKind::ap_diagram: return run_ap_diagram(cfg);
    case ExperimentKind::rate_fit: return run_rate_fit(cfg);
    case ExperimentKind::eps_sweep: return run_eps_sweep(cfg);
    case ExperimentKind::brownian_compare: return run_brownian_compare(cfg);
    case ExperimentKind::variation_diag: return run_variation_diag(cfg);
    }
    throw ConfigError("unhandled experiment kind");
}

} // namespace fbmavg
