// Experiment driver for slow-fast systems driven by fractional Brownian
// motion: reads a config file, runs one experiment, writes CSV tables.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbmavg/experiments.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "override [mc] base_seed");
    cmd->add_option("--out", opts.out_dir, "override [output] dir");
    cmd->add_option("--threads", opts.threads,
                    "worker threads (default: FBMAVG_THREADS or all cores)");
}

int run(fbmavg::ExperimentKind kind, const CommonOpts& opts) {
    fbmavg::ExperimentConfig cfg = fbmavg::load_config(opts.config_path);
    if (cfg.kind && *cfg.kind != kind)
        throw fbmavg::ConfigError(opts.config_path + ": [experiment] kind is '" +
                                  fbmavg::experiment_kind_name(*cfg.kind) +
                                  "' but the subcommand is '" +
                                  fbmavg::experiment_kind_name(kind) + "'");
    cfg.kind = kind;
    if (opts.seed)
        cfg.base_seed = *opts.seed;
    if (opts.out_dir)
        cfg.out_dir = *opts.out_dir;
    cfg.threads = opts.threads;

    for (const std::string& warning : cfg.g->theory_warnings())
        std::cerr << "warning: " << warning << "\n";

    for (const std::string& file : fbmavg::run_experiment(cfg))
        std::cout << file << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"slow-fast fBm SDE schemes: simulation and convergence experiments"};
    app.require_subcommand(1);

    struct Sub {
        fbmavg::ExperimentKind kind;
        const char* description;
    };
    const Sub subs[] = {
        {fbmavg::ExperimentKind::simulate, "one coupled trajectory of all schemes"},
        {fbmavg::ExperimentKind::ap_diagram, "both iterated-limit error curves"},
        {fbmavg::ExperimentKind::rate_fit, "dt-convergence of the conditional criterion"},
        {fbmavg::ExperimentKind::eps_sweep, "terminal gap between the AP and limiting schemes"},
        {fbmavg::ExperimentKind::brownian_compare, "standard-Brownian contrast experiment"},
        {fbmavg::ExperimentKind::variation_diag, "variation-process boundedness diagnostics"},
    };

    CommonOpts opts[std::size(subs)];
    for (std::size_t i = 0; i < std::size(subs); ++i)
        add_common(app.add_subcommand(fbmavg::experiment_kind_name(subs[i].kind),
                                      subs[i].description),
                   opts[i]);

    CLI11_PARSE(app, argc, argv);

    try {
        for (std::size_t i = 0; i < std::size(subs); ++i)
            if (app.get_subcommand(fbmavg::experiment_kind_name(subs[i].kind))->parsed())
                return run(subs[i].kind, opts[i]);
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
