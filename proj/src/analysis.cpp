#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "rng.hpp"

namespace dmbl {

std::uint64_t realization_seed(std::uint64_t master_seed, int sites, double disorder, std::uint64_t index) {
  return stable_hash({master_seed, static_cast<std::uint64_t>(sites), double_bits(disorder), index});
}

std::uint64_t evolution_seed(std::uint64_t realization_seed, double evolution_disorder) {
  constexpr std::uint64_t kEvolutionTag = 0x65766f6c7665ULL;
  return stable_hash({realization_seed, double_bits(evolution_disorder), kEvolutionTag});
}

RealizationWorkspace::RealizationWorkspace(int sites, double disorder, std::uint64_t seed,
                                           const SimulationSettings& settings)
    : realization_(DisorderRealization::draw(sites, disorder, seed)),
      basis_(sites, default_sector_n_up(sites)) {
  if (basis_.size() > settings.dimension_cap)
    fail(ErrorCode::dimension_cap_exceeded, "sector dimension " + std::to_string(basis_.size()) + " exceeds cap " +
                                                std::to_string(settings.dimension_cap));
}

EigenstateSelection RealizationWorkspace::select(double epsilon) const {
  if (!solver_) {
    const auto h = build_env_hamiltonian(basis_, realization_);
    solver_.emplace(h.dense());
  }
  EigenstateSelection sel;
  sel.epsilon_target = epsilon;
  const auto& energies = solver_->eigenvalues();
  sel.chosen_index = nearest_normalized_index(energies, epsilon);
  sel.energy = energies[static_cast<Eigen::Index>(sel.chosen_index)];
  sel.epsilon_achieved = (sel.energy - energies[0]) / (energies[energies.size() - 1] - energies[0]);
  sel.state = solver_->eigenvector(sel.chosen_index);
  return sel;
}

const OperatorMatrix& RealizationWorkspace::env_full() const {
  if (!env_full_) env_full_.emplace(build_env_hamiltonian_full(basis_.sites(), realization_));
  return *env_full_;
}

RealizationRecord evaluate_initial_state(const EigenstateSelection& initial, const SectorBasis& basis,
                                         const RealizationWorkspace* evolution, double lambda, double t,
                                         const Observables& observables, const SimulationSettings& settings,
                                         std::uint64_t sampling_seed) {
  RealizationRecord rec;
  rec.epsilon_achieved = initial.epsilon_achieved;
  if (observables.entanglement) rec.entanglement_entropy = halfchain_entropy(initial.state, basis);

  const ComplexVector xi = embed_full(initial.state, basis).cast<cplx>();
  BranchState branches;
  if (lambda == 0.0 || evolution == nullptr) {
    branches = propagate_lambda0(xi, basis.sites(), t);
  } else {
    const BranchGenerators generators(evolution->env_full(), build_hse(basis.sites()), lambda);
    branches = propagate_krylov(xi, generators, t, settings.krylov);
  }
  branches.lambda = lambda;

  const auto dec = decoherence_factor(branches);
  rec.r = dec.r;
  rec.purity = dec.purity;
  rec.system_entropy = dec.system_entropy;

  if (observables.redundancy) {
    try {
      FragmentPolicy policy = settings.fragments;
      policy.seed = stable_hash({policy.seed, sampling_seed});
      auto curve = lack_of_redundancy(branches, policy, settings.entropy_threshold);
      rec.lack_of_redundancy = curve.lack_of_redundancy;
      rec.mi_avg = std::move(curve.mi_avg);
      rec.mi_rescaled = std::move(curve.mi_rescaled);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate_system_entropy) throw;
      rec.failure = e.code();
      rec.failure_message = e.what();
    }
  }
  return rec;
}

RealizationRecord run_realization(const RealizationConfig& config, std::uint64_t seed) {
  const RealizationWorkspace initial(config.sites, config.disorder, seed, config.settings);
  const auto sel = initial.select(config.epsilon);
  std::optional<RealizationWorkspace> fresh;
  const RealizationWorkspace* evolution = &initial;
  if (config.evolution_disorder) {
    fresh.emplace(config.sites, *config.evolution_disorder, evolution_seed(seed, *config.evolution_disorder),
                  config.settings);
    evolution = &*fresh;
  }
  auto rec = evaluate_initial_state(sel, initial.basis(), evolution, config.lambda, config.t, config.observables,
                                    config.settings, seed);
  rec.seed = seed;
  return rec;
}

std::vector<double> PointResult::values(double RealizationRecord::*field) const {
  std::vector<double> out;
  for (const auto& r : records)
    if (r) out.push_back((*r).*field);
  return out;
}

std::vector<double> PointResult::lr_values() const {
  std::vector<double> out;
  for (const auto& r : records)
    if (r && r->lack_of_redundancy) out.push_back(*r->lack_of_redundancy);
  return out;
}

std::vector<double> PointResult::entropy_per_site_values() const {
  std::vector<double> out;
  for (const auto& r : records)
    if (r) out.push_back(r->entanglement_entropy / key.sites);
  return out;
}

const PointResult* SweepResult::find(int sites, double disorder, double epsilon, double lambda) const {
  for (const auto& p : points)
    if (p.key.sites == sites && p.key.disorder == disorder && p.key.epsilon == epsilon && p.key.lambda == lambda)
      return &p;
  return nullptr;
}

namespace {

void aggregate(PointResult& p, bool redundancy) {
  p.lack_of_redundancy = summarize(p.lr_values());
  p.entanglement_entropy = summarize(p.values(&RealizationRecord::entanglement_entropy));
  p.entanglement_per_site = summarize(p.entropy_per_site_values());
  std::vector<double> abs_r;
  for (const auto& r : p.records)
    if (r) abs_r.push_back(std::abs(r->r));
  p.abs_r = summarize(abs_r);
  p.system_entropy = summarize(p.values(&RealizationRecord::system_entropy));

  const auto total = p.records.size();
  const auto present = static_cast<std::size_t>(std::count_if(p.records.begin(), p.records.end(),
                                                              [](const auto& r) { return r.has_value(); }));
  p.n_ok = redundancy ? p.lack_of_redundancy.count : present;
  p.n_failed = total - p.n_ok;

  if (!redundancy) return;
  const auto sites = static_cast<std::size_t>(p.key.sites);
  p.mi_avg.assign(sites, {});
  p.mi_rescaled.assign(sites, {});
  for (std::size_t l = 0; l < sites; ++l) {
    std::vector<double> avg, rescaled;
    for (const auto& r : p.records) {
      if (!r || r->mi_avg.size() != sites) continue;
      avg.push_back(r->mi_avg[l]);
      rescaled.push_back(r->mi_rescaled[l]);
    }
    p.mi_avg[l] = summarize(avg);
    p.mi_rescaled[l] = summarize(rescaled);
  }
}

// Runs `evaluate(point_index)` and files either its record or a hard failure.
template <typename Evaluate>
void guarded(PointResult& point, std::size_t index, std::uint64_t seed, std::vector<FailureRecord>& failures,
             Evaluate&& evaluate) {
  try {
    auto rec = evaluate();
    rec.seed = seed;
    point.records[index] = std::move(rec);
  } catch (const Error& e) {
    failures.push_back({point.key, index, seed, e.code(), e.what()});
  } catch (const std::exception& e) {
    failures.push_back({point.key, index, seed, ErrorCode::non_convergence, e.what()});
  }
}

SweepResult finish(std::vector<PointResult> points, std::vector<std::vector<FailureRecord>> unit_failures,
                   bool redundancy) {
  SweepResult out;
  for (auto& p : points) aggregate(p, redundancy);
  out.points = std::move(points);
  for (auto& f : unit_failures)
    for (auto& rec : f) out.hard_failures.push_back(std::move(rec));
  std::stable_sort(out.hard_failures.begin(), out.hard_failures.end(),
                   [](const FailureRecord& a, const FailureRecord& b) { return a.index < b.index; });
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_arguments, what);
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int threads) {
  require(!spec.sizes.empty() && !spec.disorder.empty() && !spec.epsilons.empty() && !spec.lambdas.empty(),
          "run_sweep: every axis needs at least one value");
  require(spec.realizations >= 1, "run_sweep: N must be >= 1");

  const std::size_t n_h = spec.disorder.size(), n_eps = spec.epsilons.size(), n_lam = spec.lambdas.size();
  const std::size_t n = spec.realizations;
  std::vector<PointResult> points;
  for (int sites : spec.sizes)
    for (double h : spec.disorder)
      for (double eps : spec.epsilons)
        for (double lam : spec.lambdas) {
          PointResult p;
          p.key = {sites, h, eps, lam, spec.t, h};
          p.records.resize(n);
          points.push_back(std::move(p));
        }

  const std::size_t units = spec.sizes.size() * n_h * n;
  std::vector<std::vector<FailureRecord>> failures(units);
  parallel_for(units, threads, [&](std::size_t unit) {
    const std::size_t index = unit % n;
    const std::size_t ih = (unit / n) % n_h;
    const std::size_t il = unit / (n * n_h);
    const int sites = spec.sizes[il];
    const double h = spec.disorder[ih];
    const std::uint64_t seed = realization_seed(spec.master_seed, sites, h, index);
    const std::size_t first = (il * n_h + ih) * n_eps * n_lam;

    std::optional<RealizationWorkspace> initial, fresh;
    try {
      initial.emplace(sites, h, seed, spec.settings);
      if (spec.evolution_fields == EvolutionFields::fresh)
        fresh.emplace(sites, h, evolution_seed(seed, h), spec.settings);
    } catch (const Error& e) {
      for (std::size_t k = 0; k < n_eps * n_lam; ++k)
        failures[unit].push_back({points[first + k].key, index, seed, e.code(), e.what()});
      return;
    }
    const RealizationWorkspace* evolution = fresh ? &*fresh : &*initial;

    for (std::size_t ie = 0; ie < n_eps; ++ie) {
      std::optional<EigenstateSelection> sel;
      for (std::size_t k = 0; k < n_lam; ++k) {
        auto& point = points[first + ie * n_lam + k];
        guarded(point, index, seed, failures[unit], [&] {
          if (!sel) sel = initial->select(spec.epsilons[ie]);
          return evaluate_initial_state(*sel, initial->basis(), evolution, spec.lambdas[k], spec.t, spec.observables,
                                        spec.settings, seed);
        });
      }
    }
  });
  return finish(std::move(points), std::move(failures), spec.observables.redundancy);
}

SweepResult run_fixed_initial_state_sweep(const FixedInitialSpec& spec, int threads) {
  require(!spec.sizes.empty() && !spec.evolution_disorder.empty() && !spec.lambdas.empty(),
          "fixed-initial sweep: every axis needs at least one value");
  require(spec.realizations >= 1, "fixed-initial sweep: N must be >= 1");

  const std::size_t n_h = spec.evolution_disorder.size(), n_lam = spec.lambdas.size();
  const std::size_t n = spec.realizations;
  std::vector<PointResult> points;
  for (int sites : spec.sizes)
    for (double hp : spec.evolution_disorder)
      for (double lam : spec.lambdas) {
        PointResult p;
        p.key = {sites, spec.initial_disorder, spec.initial_epsilon, lam, spec.t, hp};
        p.records.resize(n);
        points.push_back(std::move(p));
      }

  const Observables observables{true, true};
  const std::size_t units = spec.sizes.size() * n;
  std::vector<std::vector<FailureRecord>> failures(units);
  parallel_for(units, threads, [&](std::size_t unit) {
    const std::size_t index = unit % n;
    const std::size_t il = unit / n;
    const int sites = spec.sizes[il];
    const std::uint64_t seed = realization_seed(spec.master_seed, sites, spec.initial_disorder, index);
    const std::size_t first = il * n_h * n_lam;

    std::optional<RealizationWorkspace> initial;
    std::optional<EigenstateSelection> sel;
    try {
      initial.emplace(sites, spec.initial_disorder, seed, spec.settings);
      sel = initial->select(spec.initial_epsilon);
    } catch (const Error& e) {
      for (std::size_t k = 0; k < n_h * n_lam; ++k)
        failures[unit].push_back({points[first + k].key, index, seed, e.code(), e.what()});
      return;
    }
    for (std::size_t ih = 0; ih < n_h; ++ih) {
      const double hp = spec.evolution_disorder[ih];
      std::optional<RealizationWorkspace> evolution;
      for (std::size_t k = 0; k < n_lam; ++k) {
        auto& point = points[first + ih * n_lam + k];
        guarded(point, index, seed, failures[unit], [&] {
          if (!evolution) evolution.emplace(sites, hp, evolution_seed(seed, hp), spec.settings);
          return evaluate_initial_state(*sel, initial->basis(), &*evolution, spec.lambdas[k], spec.t, observables,
                                        spec.settings, seed);
        });
      }
    }
  });
  return finish(std::move(points), std::move(failures), true);
}

std::vector<double> EnsembleCurve::means() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(summarize(s).mean);
  return out;
}

namespace {

double interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  const auto lo = hi - 1;
  const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] * (1.0 - w) + ys[hi] * w;
}

void check_series(std::span<const double> h, std::span<const double> y, const char* which) {
  if (h.size() != y.size() || h.empty())
    fail(ErrorCode::invalid_arguments, std::string(which) + " curve: mismatched or empty series");
  if (!std::is_sorted(h.begin(), h.end()) || std::adjacent_find(h.begin(), h.end()) != h.end())
    fail(ErrorCode::invalid_arguments, std::string(which) + " curve: h must be strictly increasing");
}

}  // namespace

double find_crossing(std::span<const double> h_small, std::span<const double> y_small,
                     std::span<const double> h_large, std::span<const double> y_large) {
  check_series(h_small, y_small, "small");
  check_series(h_large, y_large, "large");
  const double lo = std::max(h_small.front(), h_large.front());
  const double hi = std::min(h_small.back(), h_large.back());
  std::vector<double> grid;
  for (auto series : {h_small, h_large})
    for (double h : series)
      if (h >= lo && h <= hi) grid.push_back(h);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < 2) fail(ErrorCode::no_crossing_in_range, "curves do not overlap in h");

  std::vector<double> diff;
  for (double h : grid) diff.push_back(interpolate(h_large, y_large, h) - interpolate(h_small, y_small, h));
  // Exact zeros only count when the sign on either side differs; touching is not crossing.
  std::size_t prev = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (diff[i] == 0.0) continue;
    if (prev != grid.size() && (diff[prev] < 0.0) != (diff[i] < 0.0)) {
      if (i - prev > 1) return grid[prev + 1];
      const double w = diff[prev] / (diff[prev] - diff[i]);
      return grid[prev] + w * (grid[i] - grid[prev]);
    }
    prev = i;
  }
  fail(ErrorCode::no_crossing_in_range, "no sign change of the curve difference in range");
}

CrossingEstimate estimate_crossing(const EnsembleCurve& small, const EnsembleCurve& large, std::size_t resamples,
                                   std::uint64_t seed, double confidence) {
  if (large.sites <= small.sites)
    fail(ErrorCode::invalid_arguments, "estimate_crossing: second curve must be the larger size");
  for (const auto* c : {&small, &large}) {
    if (c->samples.size() != c->disorder.size())
      fail(ErrorCode::invalid_arguments, "estimate_crossing: samples do not match the h grid");
    for (const auto& s : c->samples)
      if (s.empty()) fail(ErrorCode::invalid_arguments, "estimate_crossing: empty sample at some h");
  }

  CrossingEstimate out;
  const auto ms = small.means(), ml = large.means();
  out.h_c = find_crossing(small.disorder, ms, large.disorder, ml);

  Engine engine(seed);
  auto resample_means = [&](const EnsembleCurve& c) {
    std::vector<double> means;
    means.reserve(c.samples.size());
    for (const auto& s : c.samples) {
      std::vector<double> draw(s.size());
      for (auto& v : draw) v = s[uniform_index(engine, s.size())];
      means.push_back(summarize(draw).mean);
    }
    return means;
  };
  std::vector<double> crossings;
  for (std::size_t b = 0; b < resamples; ++b) {
    const auto bs = resample_means(small);
    const auto bl = resample_means(large);
    try {
      crossings.push_back(find_crossing(small.disorder, bs, large.disorder, bl));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_crossing_in_range) throw;
      ++out.resamples_without_crossing;
    }
  }
  out.resamples = resamples;
  if (crossings.empty()) {
    out.lower = out.upper = out.h_c;
  } else {
    out.lower = quantile(crossings, 0.5 * (1.0 - confidence));
    out.upper = quantile(crossings, 0.5 * (1.0 + confidence));
  }
  return out;
}

ScalingCollapse collapse(std::span<const SizeCurve> curves, double h_c, double nu) {
  if (curves.size() < 2) fail(ErrorCode::insufficient_overlap, "collapse needs at least two system sizes");
  if (!(nu > 0.0)) fail(ErrorCode::invalid_arguments, "collapse exponent nu must be positive");

  ScalingCollapse out;
  out.h_c = h_c;
  out.nu = nu;
  std::vector<std::vector<double>> xs(curves.size()), ys(curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    check_series(c.disorder, c.value, "collapse");
    for (std::size_t k = 0; k < c.disorder.size(); ++k) {
      const double d = c.disorder[k] - h_c;
      const double x = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) * c.sites * std::pow(std::abs(d), nu);
      xs[i].push_back(x);
      ys[i].push_back(c.value[k]);
      out.points.push_back({c.sites, c.disorder[k], x, c.value[k]});
    }
  }

  double cost = 0.0;
  std::size_t comparisons = 0;
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = 0; j < curves.size(); ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < xs[i].size(); ++k) {
        const double x = xs[i][k];
        if (x < xs[j].front() || x > xs[j].back()) continue;
        const double dy = ys[i][k] - interpolate(xs[j], ys[j], x);
        cost += dy * dy;
        ++comparisons;
      }
    }
  if (comparisons == 0) fail(ErrorCode::insufficient_overlap, "collapsed curves do not overlap");
  out.quality = cost / static_cast<double>(comparisons);
  return out;
}

namespace {

std::vector<double> grid_values(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) fail(ErrorCode::invalid_arguments, "collapse grid: bad range");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

}  // namespace

ScalingCollapse collapse_profile(std::span<const SizeCurve> curves, double h_c, const CollapseGrid& grid) {
  std::optional<ScalingCollapse> best;
  for (double nu : grid_values(grid.nu_min, grid.nu_max, grid.nu_step)) {
    try {
      auto c = collapse(curves, h_c, nu);
      if (!best || c.quality < best->quality) best = std::move(c);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::insufficient_overlap || curves.size() < 2) throw;
    }
  }
  if (!best) fail(ErrorCode::insufficient_overlap, "no grid point yields overlapping collapsed curves");
  return *best;
}

ScalingCollapse collapse_search(std::span<const SizeCurve> curves, const CollapseGrid& grid) {
  std::optional<ScalingCollapse> best;
  for (double h_c : grid_values(grid.hc_min, grid.hc_max, grid.hc_step)) {
    try {
      auto c = collapse_profile(curves, h_c, grid);
      if (!best || c.quality < best->quality) best = std::move(c);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::insufficient_overlap || curves.size() < 2) throw;
    }
  }
  if (!best) fail(ErrorCode::insufficient_overlap, "no grid point yields overlapping collapsed curves");
  return *best;
}

}  // namespace dmbl
