#pragma once

#include "mkdvlab/config.hpp"
#include "mkdvlab/result.hpp"

namespace mkdvlab {

/// Runs the configured experiment with cfg.workers threads. Parameter values that the modules
/// reject surface as config_error before any sampling starts.
ExperimentResult run_experiment(const RunConfig& cfg);

}  // namespace mkdvlab
