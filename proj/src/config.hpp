#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "analysis.hpp"
#include "error.hpp"

namespace dmbl {

enum class Protocol {
  redundancy_curve,
  lr_sweep,
  ee_sweep,
  collapse,
  mobility_edge,
  lambda_sweep,
  fixed_initial_sweep,
};

std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view name);

enum class FragmentMode { automatic, exact, sampled };

struct ExperimentConfig {
  Protocol protocol = Protocol::lr_sweep;
  std::vector<int> sizes;
  std::vector<double> disorder;
  std::vector<double> epsilons{0.5};
  std::vector<double> lambdas{0.0};
  double t = std::numbers::pi / 4;
  std::size_t realizations = 1000;
  std::uint64_t master_seed = 0;

  FragmentMode fragment_mode = FragmentMode::automatic;
  std::uint64_t fragment_exact_limit = 4000;
  std::size_t fragment_samples = 2000;
  double krylov_tol = 1e-8;
  int krylov_dim = 30;
  int krylov_max_steps = 100000;
  std::size_t dimension_cap = kDefaultDimensionCap;
  double entropy_threshold = kSystemEntropyThreshold;

  EvolutionFields evolution_fields = EvolutionFields::same;
  double initial_disorder = 5.0;
  double initial_epsilon = 0.5;
  std::size_t bootstrap_resamples = 200;
  CollapseGrid collapse_grid;
  std::string output_dir = ".";

  bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigIssue {
  std::string field;
  std::string message;
  int line = 0;  // 1-based, 0 when not tied to the text
  int column = 0;
};

// Carries every problem found, not just the first.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// `key = value` lines, `#` comments. Lists are comma separated; an item may be
// an inclusive range `start:stop:step`. Reals accept `pi`, `pi/4`, `3*pi/4`.
ExperimentConfig parse_config(std::string_view text);
std::string serialize_config(const ExperimentConfig& config);
std::vector<ConfigIssue> validate(const ExperimentConfig& config);

SimulationSettings settings_from(const ExperimentConfig& config);

}  // namespace dmbl
