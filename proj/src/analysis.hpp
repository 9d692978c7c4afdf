#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "operators.hpp"
#include "qinfo.hpp"
#include "spectral.hpp"
#include "statistics.hpp"

namespace dmbl {

struct SimulationSettings {
  FragmentPolicy fragments;
  KrylovOptions krylov;
  std::size_t dimension_cap = kDefaultDimensionCap;
  double entropy_threshold = kSystemEntropyThreshold;
};

struct Observables {
  bool redundancy = true;
  bool entanglement = true;
};

// Seed of realization `index` at grid point (L, h). Independent of epsilon,
// lambda and t, so those axes share disorder realizations.
std::uint64_t realization_seed(std::uint64_t master_seed, int sites, double disorder, std::uint64_t index);

// Seed of the freshly drawn evolution fields at strength h' for a realization.
std::uint64_t evolution_seed(std::uint64_t realization_seed, double evolution_disorder);

// One disorder realization of the environment: fields, sector Hamiltonian and
// its tridiagonal reduction (shared by every epsilon), plus the full-space
// Hamiltonian built on first use.
class RealizationWorkspace {
 public:
  RealizationWorkspace(int sites, double disorder, std::uint64_t seed, const SimulationSettings& settings);

  int sites() const noexcept { return basis_.sites(); }
  const DisorderRealization& realization() const noexcept { return realization_; }
  const SectorBasis& basis() const noexcept { return basis_; }

  EigenstateSelection select(double epsilon) const;
  const OperatorMatrix& env_full() const;

 private:
  DisorderRealization realization_;
  SectorBasis basis_;
  mutable std::optional<linalg::TridiagonalEigensolver> solver_;
  mutable std::optional<OperatorMatrix> env_full_;
};

struct RealizationRecord {
  std::uint64_t seed = 0;
  double epsilon_achieved = 0.0;
  double entanglement_entropy = 0.0;  // half-chain, nats
  cplx r;
  double purity = 1.0;
  double system_entropy = 0.0;
  std::optional<double> lack_of_redundancy;
  std::vector<double> mi_avg;       // l = 1..L, empty when redundancy failed or was not requested
  std::vector<double> mi_rescaled;
  std::optional<ErrorCode> failure;  // soft failure of the redundancy measure
  std::string failure_message;
};

// Evolves |+x> (x) |xi> to time t under the branch generators built from
// `evolution` (nullptr or lambda = 0: interaction only) and evaluates the
// requested observables. Degenerate system entropy is recorded, not thrown.
// `sampling_seed` decorrelates sampled fragments between realizations.
RealizationRecord evaluate_initial_state(const EigenstateSelection& initial, const SectorBasis& basis,
                                         const RealizationWorkspace* evolution, double lambda, double t,
                                         const Observables& observables, const SimulationSettings& settings,
                                         std::uint64_t sampling_seed = 0);

struct RealizationConfig {
  int sites = 10;
  double disorder = 1.0;
  double epsilon = 0.5;
  double lambda = 0.0;
  double t = std::numbers::pi / 4;
  // Evolve with fresh fields at this strength instead of the initial realization.
  std::optional<double> evolution_disorder;
  Observables observables;
  SimulationSettings settings;
};

RealizationRecord run_realization(const RealizationConfig& config, std::uint64_t seed);

struct PointKey {
  int sites = 0;
  double disorder = 0.0;  // strength used to prepare the initial eigenstate
  double epsilon = 0.0;
  double lambda = 0.0;
  double t = 0.0;
  double evolution_disorder = 0.0;
};

struct FailureRecord {
  PointKey point;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  ErrorCode code = ErrorCode::non_convergence;
  std::string message;
};

struct PointResult {
  PointKey key;
  std::vector<std::optional<RealizationRecord>> records;  // by realization index; empty on hard failure
  Summary lack_of_redundancy;  // over realizations with a defined LR
  Summary entanglement_entropy;
  Summary entanglement_per_site;
  Summary abs_r;
  Summary system_entropy;
  std::vector<Summary> mi_avg;
  std::vector<Summary> mi_rescaled;
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;  // degenerate entropy plus hard failures

  std::vector<double> values(double RealizationRecord::*field) const;
  std::vector<double> lr_values() const;
  std::vector<double> entropy_per_site_values() const;
};

struct SweepResult {
  std::vector<PointResult> points;
  std::vector<FailureRecord> hard_failures;

  const PointResult* find(int sites, double disorder, double epsilon, double lambda) const;
};

enum class EvolutionFields { same, fresh };

struct SweepSpec {
  std::vector<int> sizes;
  std::vector<double> disorder;
  std::vector<double> epsilons{0.5};
  std::vector<double> lambdas{0.0};
  double t = std::numbers::pi / 4;
  std::size_t realizations = 1;
  std::uint64_t master_seed = 0;
  EvolutionFields evolution_fields = EvolutionFields::same;
  Observables observables;
  SimulationSettings settings;
};

// Points are ordered by (L, h, epsilon, lambda) following the SweepSpec vectors.
// Results do not depend on the thread count.
SweepResult run_sweep(const SweepSpec& spec, int threads = 1);

struct FixedInitialSpec {
  std::vector<int> sizes{10};
  double initial_disorder = 5.0;
  double initial_epsilon = 0.5;
  std::vector<double> evolution_disorder;
  std::vector<double> lambdas{0.0};
  double t = std::numbers::pi;
  std::size_t realizations = 1;
  std::uint64_t master_seed = 0;
  SimulationSettings settings;
};

// Initial eigenstate prepared at the fixed (h, epsilon) for every realization,
// then evolved with freshly drawn fields at each evolution strength h'.
// Points are ordered by (L, h', lambda).
SweepResult run_fixed_initial_state_sweep(const FixedInitialSpec& spec, int threads = 1);

// Per-h samples of an observable for one system size.
struct EnsembleCurve {
  int sites = 0;
  std::vector<double> disorder;
  std::vector<std::vector<double>> samples;

  std::vector<double> means() const;
};

// First sign change of (large - small) on the union of both grids inside their
// overlap, located by piecewise-linear interpolation.
double find_crossing(std::span<const double> h_small, std::span<const double> y_small,
                     std::span<const double> h_large, std::span<const double> y_large);

struct CrossingEstimate {
  double h_c = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t resamples = 0;
  std::size_t resamples_without_crossing = 0;
};

// Crossing of the mean curves with a percentile bootstrap interval obtained by
// resampling realizations at every h.
CrossingEstimate estimate_crossing(const EnsembleCurve& small, const EnsembleCurve& large,
                                   std::size_t resamples = 200, std::uint64_t seed = 0, double confidence = 0.95);

struct SizeCurve {
  int sites = 0;
  std::vector<double> disorder;
  std::vector<double> value;
};

struct CollapsePoint {
  int sites = 0;
  double disorder = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct ScalingCollapse {
  double h_c = 0.0;
  double nu = 0.0;
  double quality = 0.0;
  std::vector<CollapsePoint> points;
};

// x = sgn(h - h_c) L |h - h_c|^nu. Quality is the mean squared deviation of each
// point from the linear interpolant of every other size that covers its x.
ScalingCollapse collapse(std::span<const SizeCurve> curves, double h_c, double nu);

struct CollapseGrid {
  double hc_min = 1.5;
  double hc_max = 5.5;
  double hc_step = 0.05;
  double nu_min = 0.3;
  double nu_max = 2.0;
  double nu_step = 0.05;

  bool operator==(const CollapseGrid&) const = default;
};

ScalingCollapse collapse_search(std::span<const SizeCurve> curves, const CollapseGrid& grid = {});

// Best collapse over nu at a fixed h_c.
ScalingCollapse collapse_profile(std::span<const SizeCurve> curves, double h_c, const CollapseGrid& grid = {});

}  // namespace dmbl
