#pragma once

#include "config.hpp"

namespace kvflow {

// Each command returns a process exit code: 0 on success. Configuration
// problems throw kv::ConfigError, solver failures kv::SolverError; run_cli
// maps those to exit codes 2 and 3.
int cmd_convergence(const RunConfig& config);
int cmd_decay(const RunConfig& config);
int cmd_boundedness(const RunConfig& config);
int cmd_selftest();

// Full front end: flag parsing, config loading, dispatch, exit-code mapping.
int run_cli(int argc, const char* const* argv);

}  // namespace kvflow
