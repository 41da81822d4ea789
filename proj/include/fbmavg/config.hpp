#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbmavg/expr.hpp"
#include "fbmavg/schemes.hpp"

namespace fbmavg {

inline constexpr const char* project_version = "0.1.0";

enum class ExperimentKind {
    simulate,
    ap_diagram,
    rate_fit,
    eps_sweep,
    brownian_compare,
    variation_diag,
};

const char* experiment_kind_name(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(std::string_view name);

/// Config-file load or validation failure; messages name the offending
/// field and line.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Validated experiment description, loaded from a sectioned key=value
/// file (see README for the grammar).
struct ExperimentConfig {
    // [system]
    std::string g_text;
    std::optional<CoeffExpr> g;
    double h = 0.75;
    std::vector<double> epsilons{0.1}; // epsilon or epsilon_list; 0 = limiting flag
    double x0 = 0.0;
    double m0 = 0.0;
    Driver driver = Driver::fractional;

    // [grid]
    double horizon = 1.0;
    std::vector<int> step_counts{256}; // N or N_list

    // [experiment]
    std::optional<ExperimentKind> kind;
    std::string phi = "tanh";
    std::vector<double> etas{0.05, 0.1, 0.25};
    int quad_order = 40;
    double fd_step = 1e-4;
    int paths = 4; // driver paths for variation-diag

    // [mc]
    int outer = 200;
    int inner = 500;
    std::uint64_t base_seed = 12345;

    // [output]
    std::string out_dir = "out";

    // not part of the file
    std::uint64_t config_hash = 0;
    int threads = 0;

    SystemSpec make_system(double epsilon) const;
};

ExperimentConfig load_config(const std::string& path);

} // namespace fbmavg
