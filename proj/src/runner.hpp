#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "analysis.hpp"
#include "config.hpp"

namespace dmbl {

enum class RunStatus { ok = 0, validation = 1, runtime = 2, partial = 3 };

struct RunOptions {
  int threads = 1;
  bool overwrite = false;
};

struct RunOutcome {
  RunStatus status = RunStatus::ok;
  std::filesystem::path results_path;
  std::filesystem::path manifest_path;
  std::size_t hard_failures = 0;
  std::size_t soft_failures = 0;
  double wall_seconds = 0.0;
};

// Fixed-format number: 12 significant digits, independent of locale.
std::string format_number(double v);

std::filesystem::path results_path(const ExperimentConfig& config);
std::filesystem::path manifest_path(const ExperimentConfig& config);

// Computes the protocol's sweep. Throws Error on invalid configs.
SweepResult compute(const ExperimentConfig& config, int threads);

// Results table for a computed sweep; a pure function of its inputs.
std::string render_results(const ExperimentConfig& config, const SweepResult& sweep);

// Runs the protocol and writes the results table and manifest. Existing files
// are left untouched unless options.overwrite is set.
RunOutcome run(const ExperimentConfig& config, const RunOptions& options);

}  // namespace dmbl
