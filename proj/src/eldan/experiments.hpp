// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// Experiment drivers behind the command-line subcommands. Each driver turns a
// configuration into named output files (CSV time series, JSON tables,
// gnuplot-ready columns) plus a JSON summary and a verdict.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "eldan/config.hpp"

namespace eldan {

struct RunOptions {
  int threads = 0;  // 0: hardware concurrency
};

struct ExperimentResult {
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  Json summary;
  bool verdict_ok = true;  // false: an invariant or inequality was violated
};

/// Commands: localize, tube, baseline, mixture, centerlaw, tilt, selftest.
ExperimentResult run_experiment(const std::string& command,
                                const ExperimentConfig& config,
                                const RunOptions& opts = {});

const std::vector<std::string>& experiment_commands();

/// printf("%.17g")
std::string format_real(double x);

}  // namespace eldan
