#pragma once

#include <string>
#include <vector>

#include "fbmavg/config.hpp"

namespace fbmavg {

/// Runs the configured experiment and writes one CSV per result table
/// into the output directory. Deterministic for a fixed (config, seed):
/// CSV bodies are byte-identical across runs and thread counts (only the
/// '# generated=' metadata line varies). Returns the written file paths.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

} // namespace fbmavg
