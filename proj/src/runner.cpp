#include "runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rng.hpp"
#include "version.hpp"

namespace dmbl {

namespace {

using Json = nlohmann::ordered_json;

std::string stderr_field(const Summary& s) { return s.stderr ? format_number(*s.stderr) : std::string(); }

const char* fields_name(EvolutionFields f) { return f == EvolutionFields::same ? "same" : "fresh"; }

SweepSpec sweep_spec(const ExperimentConfig& cfg, Observables observables) {
  SweepSpec spec;
  spec.sizes = cfg.sizes;
  spec.disorder = cfg.disorder;
  spec.epsilons = cfg.epsilons;
  spec.lambdas = cfg.lambdas;
  spec.t = cfg.t;
  spec.realizations = cfg.realizations;
  spec.master_seed = cfg.master_seed;
  spec.evolution_fields = cfg.evolution_fields;
  spec.observables = observables;
  spec.settings = settings_from(cfg);
  return spec;
}

std::vector<const PointResult*> select_points(const SweepResult& sweep, int sites, double epsilon, double lambda) {
  std::vector<const PointResult*> out;
  for (const auto& p : sweep.points)
    if (p.key.sites == sites && p.key.epsilon == epsilon && p.key.lambda == lambda) out.push_back(&p);
  return out;
}

std::vector<SizeCurve> size_curves(const ExperimentConfig& cfg, const SweepResult& sweep, bool lr) {
  std::vector<SizeCurve> curves;
  for (int sites : cfg.sizes) {
    SizeCurve c;
    c.sites = sites;
    for (const auto* p : select_points(sweep, sites, cfg.epsilons.front(), cfg.lambdas.front())) {
      const auto& s = lr ? p->lack_of_redundancy : p->entanglement_per_site;
      if (s.count == 0) continue;
      c.disorder.push_back(p->key.disorder);
      c.value.push_back(s.mean);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

EnsembleCurve ensemble_curve(const SweepResult& sweep, int sites, double epsilon, double lambda, bool lr) {
  EnsembleCurve c;
  c.sites = sites;
  for (const auto* p : select_points(sweep, sites, epsilon, lambda)) {
    c.disorder.push_back(p->key.disorder);
    c.samples.push_back(lr ? p->lr_values() : p->entropy_per_site_values());
  }
  return c;
}

void header(std::ostringstream& out, const ExperimentConfig& cfg) {
  out << "# protocol=" << to_string(cfg.protocol) << '\n';
  out << "# version=" << kVersion << '\n';
  out << "# master_seed=" << cfg.master_seed << '\n';
  out << "# realizations=" << cfg.realizations << '\n';
  out << "# t=" << format_number(cfg.t) << '\n';
  out << "# evolution_fields=" << fields_name(cfg.evolution_fields) << '\n';
  if (cfg.protocol == Protocol::fixed_initial_sweep)
    out << "# initial_h=" << format_number(cfg.initial_disorder)
        << " initial_epsilon=" << format_number(cfg.initial_epsilon) << '\n';
}

void render_redundancy_curve(std::ostringstream& out, const ExperimentConfig& cfg, const SweepResult& sweep) {
  const int sites = cfg.sizes.front();
  for (const auto& p : sweep.points) {
    out << "# point h=" << format_number(p.key.disorder) << " LR_realization_mean=" << format_number(p.lack_of_redundancy.mean)
        << " LR_realization_stderr=" << stderr_field(p.lack_of_redundancy) << " N_ok=" << p.n_ok
        << " N_failed=" << p.n_failed << '\n';
  }
  out << "h,l,f,mi_mean,mi_stderr,mi_over_HS,HS,LR\n";
  for (const auto& p : sweep.points) {
    // Area between the averaged rescaled curve and the perfect plateau.
    double area = 0.0;
    if (p.n_ok > 0)
      for (int l = 1; l < sites; ++l) area += std::abs(1.0 - p.mi_rescaled[static_cast<std::size_t>(l - 1)].mean);
    for (int l = 1; l <= sites; ++l) {
      const auto i = static_cast<std::size_t>(l - 1);
      const bool have = p.n_ok > 0;
      out << format_number(p.key.disorder) << ',' << l << ',' << format_number(static_cast<double>(l) / sites) << ',';
      if (have) {
        out << format_number(p.mi_avg[i].mean) << ',' << stderr_field(p.mi_avg[i]) << ','
            << format_number(p.mi_rescaled[i].mean) << ',';
      } else {
        out << ",,,";
      }
      out << format_number(p.system_entropy.mean) << ',' << (have ? format_number(area) : std::string()) << '\n';
    }
  }
}

void render_lr_sweep(std::ostringstream& out, const SweepResult& sweep) {
  out << "L,h,LR_mean,LR_stderr,N_ok,N_failed\n";
  for (const auto& p : sweep.points)
    out << p.key.sites << ',' << format_number(p.key.disorder) << ',' << format_number(p.lack_of_redundancy.mean) << ','
        << stderr_field(p.lack_of_redundancy) << ',' << p.n_ok << ',' << p.n_failed << '\n';
}

void render_ee_sweep(std::ostringstream& out, const SweepResult& sweep) {
  out << "L,h,SE_mean,SE_stderr,SE_over_L_mean,SE_over_L_stderr,N\n";
  for (const auto& p : sweep.points)
    out << p.key.sites << ',' << format_number(p.key.disorder) << ',' << format_number(p.entanglement_entropy.mean)
        << ',' << stderr_field(p.entanglement_entropy) << ',' << format_number(p.entanglement_per_site.mean) << ','
        << stderr_field(p.entanglement_per_site) << ',' << p.entanglement_entropy.count << '\n';
}

void render_collapse(std::ostringstream& out, const ExperimentConfig& cfg, const SweepResult& sweep) {
  struct Block {
    const char* name;
    bool lr;
    std::optional<ScalingCollapse> best;
  };
  Block blocks[] = {{"LR", true, {}}, {"SE_over_L", false, {}}};
  for (auto& b : blocks) {
    const auto curves = size_curves(cfg, sweep, b.lr);
    try {
      b.best = collapse_search(curves, cfg.collapse_grid);
      out << "# collapse observable=" << b.name << " h_c=" << format_number(b.best->h_c)
          << " nu=" << format_number(b.best->nu) << " quality=" << format_number(b.best->quality) << '\n';
    } catch (const Error& e) {
      out << "# collapse observable=" << b.name << " status=" << to_string(e.code()) << '\n';
    }
  }
  out << "observable,L,h,x,y,y_stderr\n";
  for (const auto& b : blocks) {
    for (const auto& p : sweep.points) {
      const auto& s = b.lr ? p.lack_of_redundancy : p.entanglement_per_site;
      if (s.count == 0) continue;
      out << b.name << ',' << p.key.sites << ',' << format_number(p.key.disorder) << ',';
      if (b.best) {
        const double d = p.key.disorder - b.best->h_c;
        const double x = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) * p.key.sites * std::pow(std::abs(d), b.best->nu);
        out << format_number(x);
      }
      out << ',' << format_number(s.mean) << ',' << stderr_field(s) << '\n';
    }
  }
}

void render_mobility_edge(std::ostringstream& out, const ExperimentConfig& cfg, const SweepResult& sweep) {
  const int small = cfg.sizes[cfg.sizes.size() - 2], large = cfg.sizes.back();
  const double lambda = cfg.lambdas.front();
  for (double eps : cfg.epsilons) {
    for (const bool lr : {true, false}) {
      const char* name = lr ? "LR" : "SE_over_L";
      out << "# crossing eps=" << format_number(eps) << " observable=" << name << " L_small=" << small
          << " L_large=" << large;
      try {
        const auto seed = stable_hash({cfg.master_seed, double_bits(eps), lr ? 1ULL : 2ULL});
        const auto est = estimate_crossing(ensemble_curve(sweep, small, eps, lambda, lr),
                                           ensemble_curve(sweep, large, eps, lambda, lr), cfg.bootstrap_resamples, seed);
        out << " h_c=" << format_number(est.h_c) << " lower=" << format_number(est.lower)
            << " upper=" << format_number(est.upper) << " resamples=" << est.resamples
            << " resamples_without_crossing=" << est.resamples_without_crossing << '\n';
      } catch (const Error& e) {
        out << " status=" << to_string(e.code()) << '\n';
      }
    }
  }
  out << "eps,L,h,LR_mean,LR_stderr,SE_over_L_mean,SE_over_L_stderr,N_ok,N_failed\n";
  for (double eps : cfg.epsilons)
    for (const auto& p : sweep.points) {
      if (p.key.epsilon != eps) continue;
      out << format_number(eps) << ',' << p.key.sites << ',' << format_number(p.key.disorder) << ','
          << format_number(p.lack_of_redundancy.mean) << ',' << stderr_field(p.lack_of_redundancy) << ','
          << format_number(p.entanglement_per_site.mean) << ',' << stderr_field(p.entanglement_per_site) << ','
          << p.n_ok << ',' << p.n_failed << '\n';
    }
}

void render_lambda_sweep(std::ostringstream& out, const ExperimentConfig& cfg, const SweepResult& sweep) {
  out << "eps,lambda,L,h,LR_mean,LR_stderr,N_ok,N_failed\n";
  for (double eps : cfg.epsilons)
    for (double lam : cfg.lambdas)
      for (const auto& p : sweep.points) {
        if (p.key.epsilon != eps || p.key.lambda != lam) continue;
        out << format_number(eps) << ',' << format_number(lam) << ',' << p.key.sites << ','
            << format_number(p.key.disorder) << ',' << format_number(p.lack_of_redundancy.mean) << ','
            << stderr_field(p.lack_of_redundancy) << ',' << p.n_ok << ',' << p.n_failed << '\n';
      }
}

void render_fixed_initial(std::ostringstream& out, const ExperimentConfig& cfg, const SweepResult& sweep) {
  out << "lambda,L,h_evolution,LR_mean,LR_stderr,N_ok,N_failed\n";
  for (double lam : cfg.lambdas)
    for (const auto& p : sweep.points) {
      if (p.key.lambda != lam) continue;
      out << format_number(lam) << ',' << p.key.sites << ',' << format_number(p.key.evolution_disorder) << ','
          << format_number(p.lack_of_redundancy.mean) << ',' << stderr_field(p.lack_of_redundancy) << ',' << p.n_ok
          << ',' << p.n_failed << '\n';
    }
}

Json point_json(const PointKey& k) {
  return Json{{"L", k.sites},          {"h", k.disorder}, {"epsilon", k.epsilon},
              {"lambda", k.lambda},    {"t", k.t},        {"h_evolution", k.evolution_disorder}};
}

Json manifest_json(const ExperimentConfig& cfg, const SweepResult& sweep, const RunOptions& options,
                   const RunOutcome& outcome) {
  Json m;
  m["status"] = outcome.hard_failures > 0 ? "PARTIAL" : "OK";
  m["protocol"] = std::string(to_string(cfg.protocol));
  m["version"] = kVersion;
  m["results"] = outcome.results_path.filename().string();
  m["config"] = serialize_config(cfg);
  m["master_seed"] = cfg.master_seed;
  m["seed_rule"] = cfg.protocol == Protocol::fixed_initial_sweep
                       ? "realization seed = stable_hash(master_seed, L, bits(initial_h), index); evolution fields "
                         "seeded by stable_hash(realization seed, bits(h_evolution), tag)"
                       : "realization seed = stable_hash(master_seed, L, bits(h), index), shared by every epsilon, "
                         "lambda and t";
  m["evolution_fields"] = fields_name(cfg.evolution_fields);
  m["threads"] = options.threads;
  m["wall_seconds"] = outcome.wall_seconds;
  m["hard_failures"] = outcome.hard_failures;
  m["soft_failures"] = outcome.soft_failures;

  Json points = Json::array();
  for (const auto& p : sweep.points) {
    Json j = point_json(p.key);
    j["realizations"] = Json::array({0, p.records.size()});
    j["N_ok"] = p.n_ok;
    j["N_failed"] = p.n_failed;
    points.push_back(std::move(j));
  }
  m["points"] = std::move(points);

  Json failures = Json::array();
  for (const auto& f : sweep.hard_failures) {
    Json j = point_json(f.point);
    j["index"] = f.index;
    j["seed"] = f.seed;
    j["error"] = std::string(to_string(f.code));
    j["message"] = f.message;
    failures.push_back(std::move(j));
  }
  m["failures"] = std::move(failures);
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, "cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) fail(ErrorCode::io_error, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::io_error, "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, ptr);
}

std::filesystem::path results_path(const ExperimentConfig& cfg) {
  return std::filesystem::path(cfg.output_dir) / (std::string(to_string(cfg.protocol)) + ".csv");
}

std::filesystem::path manifest_path(const ExperimentConfig& cfg) {
  return std::filesystem::path(cfg.output_dir) / (std::string(to_string(cfg.protocol)) + ".manifest.json");
}

SweepResult compute(const ExperimentConfig& cfg, int threads) {
  if (auto issues = validate(cfg); !issues.empty()) throw ConfigError(ErrorCode::validation_error, std::move(issues));
  switch (cfg.protocol) {
    case Protocol::redundancy_curve:
    case Protocol::lr_sweep:
    case Protocol::lambda_sweep:
      return run_sweep(sweep_spec(cfg, {true, false}), threads);
    case Protocol::ee_sweep:
      return run_sweep(sweep_spec(cfg, {false, true}), threads);
    case Protocol::collapse:
    case Protocol::mobility_edge:
      return run_sweep(sweep_spec(cfg, {true, true}), threads);
    case Protocol::fixed_initial_sweep: {
      FixedInitialSpec spec;
      spec.sizes = cfg.sizes;
      spec.initial_disorder = cfg.initial_disorder;
      spec.initial_epsilon = cfg.initial_epsilon;
      spec.evolution_disorder = cfg.disorder;
      spec.lambdas = cfg.lambdas;
      spec.t = cfg.t;
      spec.realizations = cfg.realizations;
      spec.master_seed = cfg.master_seed;
      spec.settings = settings_from(cfg);
      return run_fixed_initial_state_sweep(spec, threads);
    }
  }
  fail(ErrorCode::invalid_arguments, "unknown protocol");
}

std::string render_results(const ExperimentConfig& cfg, const SweepResult& sweep) {
  std::ostringstream out;
  header(out, cfg);
  out << "# hard_failures=" << sweep.hard_failures.size() << '\n';
  switch (cfg.protocol) {
    case Protocol::redundancy_curve: render_redundancy_curve(out, cfg, sweep); break;
    case Protocol::lr_sweep: render_lr_sweep(out, sweep); break;
    case Protocol::ee_sweep: render_ee_sweep(out, sweep); break;
    case Protocol::collapse: render_collapse(out, cfg, sweep); break;
    case Protocol::mobility_edge: render_mobility_edge(out, cfg, sweep); break;
    case Protocol::lambda_sweep: render_lambda_sweep(out, cfg, sweep); break;
    case Protocol::fixed_initial_sweep: render_fixed_initial(out, cfg, sweep); break;
  }
  return out.str();
}

RunOutcome run(const ExperimentConfig& cfg, const RunOptions& options) {
  if (auto issues = validate(cfg); !issues.empty()) throw ConfigError(ErrorCode::validation_error, std::move(issues));
  RunOutcome outcome;
  outcome.results_path = results_path(cfg);
  outcome.manifest_path = manifest_path(cfg);
  if (!options.overwrite)
    for (const auto& p : {outcome.results_path, outcome.manifest_path})
      if (std::filesystem::exists(p))
        fail(ErrorCode::io_error, p.string() + " exists; pass the overwrite flag to replace it");
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create output directory " + cfg.output_dir + ": " + ec.message());

  const auto start = std::chrono::steady_clock::now();
  const auto sweep = compute(cfg, std::max(1, options.threads));
  outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.hard_failures = sweep.hard_failures.size();
  for (const auto& p : sweep.points)
    for (const auto& r : p.records)
      if (r && r->failure) ++outcome.soft_failures;
  outcome.status = outcome.hard_failures > 0 ? RunStatus::partial : RunStatus::ok;

  write_file(outcome.results_path, render_results(cfg, sweep));
  write_file(outcome.manifest_path, manifest_json(cfg, sweep, options, outcome).dump(2) + "\n");
  return outcome;
}

}  // namespace dmbl
