#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "basis.hpp"

namespace dmbl {

namespace {

constexpr std::pair<Protocol, std::string_view> kProtocols[] = {
    {Protocol::redundancy_curve, "redundancy-curve"}, {Protocol::lr_sweep, "lr-sweep"},
    {Protocol::ee_sweep, "ee-sweep"},                 {Protocol::collapse, "collapse"},
    {Protocol::mobility_edge, "mobility-edge"},       {Protocol::lambda_sweep, "lambda-sweep"},
    {Protocol::fixed_initial_sweep, "fixed-initial-sweep"},
};

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    const auto& is = issues[i];
    if (i) out << "; ";
    if (is.line > 0) out << "line " << is.line << ", column " << is.column << ": ";
    if (!is.field.empty()) out << is.field << ": ";
    out << is.message;
  }
  return out.str();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits on `sep`, returning each trimmed piece with its offset in `s`.
std::vector<std::pair<std::string_view, std::size_t>> split(std::string_view s, char sep) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    const auto piece = s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    const auto lead = piece.find_first_not_of(" \t\r");
    out.emplace_back(trim(piece), start + (lead == std::string_view::npos ? 0 : lead));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_plain_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// number | [coef*]pi[/den]
std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (auto v = parse_plain_double(s)) return v;
  const auto pi_pos = s.find("pi");
  if (pi_pos == std::string_view::npos) return std::nullopt;
  double value = std::numbers::pi;
  if (pi_pos > 0) {
    auto coef = trim(s.substr(0, pi_pos));
    if (coef.empty() || coef.back() != '*') return std::nullopt;
    const auto c = parse_plain_double(trim(coef.substr(0, coef.size() - 1)));
    if (!c) return std::nullopt;
    value *= *c;
  }
  auto rest = trim(s.substr(pi_pos + 2));
  if (!rest.empty()) {
    if (rest.front() != '/') return std::nullopt;
    const auto d = parse_plain_double(trim(rest.substr(1)));
    if (!d || *d == 0.0) return std::nullopt;
    value /= *d;
  }
  return value;
}

template <typename Int>
std::optional<Int> parse_integer(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T, typename Format>
std::string format_list(const std::vector<T>& values, Format&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt(values[i]);
  }
  return out;
}

struct Parser {
  std::vector<ConfigIssue> issues;
  int line = 0;

  void issue(const std::string& field, std::size_t column, const std::string& message) {
    issues.push_back({field, message, line, static_cast<int>(column) + 1});
  }

  // Reals with range expansion.
  std::optional<std::vector<double>> real_list(const std::string& field, std::string_view value, std::size_t col) {
    std::vector<double> out;
    bool ok = true;
    for (const auto& [item, off] : split(value, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() == 1) {
        if (auto v = parse_real(item)) {
          out.push_back(*v);
          continue;
        }
        issue(field, col + off, "expected a real number, got '" + std::string(item) + "'");
        ok = false;
      } else if (parts.size() == 3) {
        const auto a = parse_real(parts[0].first), b = parse_real(parts[1].first), step = parse_real(parts[2].first);
        if (!a || !b || !step || !(*step > 0.0) || *b < *a) {
          issue(field, col + off, "range must be start:stop:step with step > 0 and stop >= start");
          ok = false;
          continue;
        }
        const auto count = static_cast<std::size_t>(std::floor((*b - *a) / *step + 1e-9)) + 1;
        if (count > 100000) {
          issue(field, col + off, "range expands to too many values");
          ok = false;
          continue;
        }
        for (std::size_t i = 0; i < count; ++i) out.push_back(*a + static_cast<double>(i) * *step);
      } else {
        issue(field, col + off, "malformed list item '" + std::string(item) + "'");
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<std::vector<int>> int_list(const std::string& field, std::string_view value, std::size_t col) {
    std::vector<int> out;
    bool ok = true;
    for (const auto& [item, off] : split(value, ',')) {
      if (auto v = parse_integer<int>(item)) {
        out.push_back(*v);
      } else {
        issue(field, col + off, "expected an integer, got '" + std::string(item) + "'");
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<double> real(const std::string& field, std::string_view value, std::size_t col) {
    if (auto v = parse_real(value)) return v;
    issue(field, col, "expected a real number, got '" + std::string(value) + "'");
    return std::nullopt;
  }

  template <typename Int>
  std::optional<Int> integer(const std::string& field, std::string_view value, std::size_t col) {
    if (auto v = parse_integer<Int>(value)) return v;
    issue(field, col, "expected a non-negative integer, got '" + std::string(value) + "'");
    return std::nullopt;
  }
};

template <typename T>
void assign(std::optional<T>&& v, T& target) {
  if (v) target = std::move(*v);
}

}  // namespace

std::string_view to_string(Protocol p) {
  for (const auto& [proto, name] : kProtocols)
    if (proto == p) return name;
  return "unknown";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
  for (const auto& [proto, n] : kProtocols)
    if (n == name) return proto;
  return std::nullopt;
}

ConfigError::ConfigError(ErrorCode code, std::vector<ConfigIssue> issues)
    : Error(code, std::string(to_string(code)) + ": " + join_issues(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  Parser p;
  std::map<std::string, int> seen;
  bool have_protocol = false, have_sizes = false, have_disorder = false, have_seed = false;

  using Handler = std::function<void(std::string_view, std::size_t)>;
  const std::string k_protocol = "protocol";
  std::map<std::string, Handler> handlers;
  handlers["protocol"] = [&](std::string_view v, std::size_t col) {
    if (auto proto = parse_protocol(v)) {
      cfg.protocol = *proto;
      have_protocol = true;
    } else {
      p.issue("protocol", col, "unknown protocol '" + std::string(v) + "'");
    }
  };
  handlers["L"] = [&](std::string_view v, std::size_t col) {
    if (auto l = p.int_list("L", v, col)) {
      cfg.sizes = *l;
      have_sizes = true;
    }
  };
  handlers["h"] = [&](std::string_view v, std::size_t col) {
    if (auto l = p.real_list("h", v, col)) {
      cfg.disorder = *l;
      have_disorder = true;
    }
  };
  handlers["epsilon"] = [&](std::string_view v, std::size_t col) { assign(p.real_list("epsilon", v, col), cfg.epsilons); };
  handlers["lambda"] = [&](std::string_view v, std::size_t col) { assign(p.real_list("lambda", v, col), cfg.lambdas); };
  handlers["t"] = [&](std::string_view v, std::size_t col) { assign(p.real("t", v, col), cfg.t); };
  handlers["realizations"] = [&](std::string_view v, std::size_t col) {
    assign(p.integer<std::size_t>("realizations", v, col), cfg.realizations);
  };
  handlers["seed"] = [&](std::string_view v, std::size_t col) {
    if (auto s = p.integer<std::uint64_t>("seed", v, col)) {
      cfg.master_seed = *s;
      have_seed = true;
    }
  };
  handlers["fragment_mode"] = [&](std::string_view v, std::size_t col) {
    if (v == "auto") cfg.fragment_mode = FragmentMode::automatic;
    else if (v == "exact") cfg.fragment_mode = FragmentMode::exact;
    else if (v == "sampled") cfg.fragment_mode = FragmentMode::sampled;
    else p.issue("fragment_mode", col, "expected auto, exact or sampled");
  };
  handlers["fragment_exact_limit"] = [&](std::string_view v, std::size_t col) {
    assign(p.integer<std::uint64_t>("fragment_exact_limit", v, col), cfg.fragment_exact_limit);
  };
  handlers["fragment_samples"] = [&](std::string_view v, std::size_t col) {
    assign(p.integer<std::size_t>("fragment_samples", v, col), cfg.fragment_samples);
  };
  handlers["krylov_tol"] = [&](std::string_view v, std::size_t col) { assign(p.real("krylov_tol", v, col), cfg.krylov_tol); };
  handlers["krylov_dim"] = [&](std::string_view v, std::size_t col) { assign(p.integer<int>("krylov_dim", v, col), cfg.krylov_dim); };
  handlers["krylov_max_steps"] = [&](std::string_view v, std::size_t col) {
    assign(p.integer<int>("krylov_max_steps", v, col), cfg.krylov_max_steps);
  };
  handlers["dimension_cap"] = [&](std::string_view v, std::size_t col) {
    assign(p.integer<std::size_t>("dimension_cap", v, col), cfg.dimension_cap);
  };
  handlers["entropy_threshold"] = [&](std::string_view v, std::size_t col) {
    assign(p.real("entropy_threshold", v, col), cfg.entropy_threshold);
  };
  handlers["evolution_fields"] = [&](std::string_view v, std::size_t col) {
    if (v == "same") cfg.evolution_fields = EvolutionFields::same;
    else if (v == "fresh") cfg.evolution_fields = EvolutionFields::fresh;
    else p.issue("evolution_fields", col, "expected same or fresh");
  };
  handlers["initial_h"] = [&](std::string_view v, std::size_t col) { assign(p.real("initial_h", v, col), cfg.initial_disorder); };
  handlers["initial_epsilon"] = [&](std::string_view v, std::size_t col) {
    assign(p.real("initial_epsilon", v, col), cfg.initial_epsilon);
  };
  handlers["bootstrap_resamples"] = [&](std::string_view v, std::size_t col) {
    assign(p.integer<std::size_t>("bootstrap_resamples", v, col), cfg.bootstrap_resamples);
  };
  auto grid_handler = [&](const char* name, double CollapseGrid::*lo, double CollapseGrid::*hi,
                          double CollapseGrid::*step) {
    handlers[name] = [&p, &cfg, name, lo, hi, step](std::string_view v, std::size_t col) {
      const auto parts = split(v, ':');
      std::optional<double> a, b, c;
      if (parts.size() == 3) {
        a = parse_real(parts[0].first);
        b = parse_real(parts[1].first);
        c = parse_real(parts[2].first);
      }
      if (!a || !b || !c) {
        p.issue(name, col, "expected min:max:step");
        return;
      }
      cfg.collapse_grid.*lo = *a;
      cfg.collapse_grid.*hi = *b;
      cfg.collapse_grid.*step = *c;
    };
  };
  grid_handler("collapse_hc", &CollapseGrid::hc_min, &CollapseGrid::hc_max, &CollapseGrid::hc_step);
  grid_handler("collapse_nu", &CollapseGrid::nu_min, &CollapseGrid::nu_max, &CollapseGrid::nu_step);
  handlers["output_dir"] = [&](std::string_view v, std::size_t col) {
    if (v.empty()) p.issue("output_dir", col, "must not be empty");
    else cfg.output_dir = std::string(v);
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    ++p.line;
    const auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (trim(raw).empty()) continue;
    const auto first = raw.find_first_not_of(" \t\r");
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) {
      p.issue("", first, "expected 'key = value'");
      continue;
    }
    const std::string key(trim(raw.substr(0, eq)));
    const auto value_part = raw.substr(eq + 1);
    const auto lead = value_part.find_first_not_of(" \t\r");
    const std::size_t value_col = eq + 1 + (lead == std::string_view::npos ? 0 : lead);
    const auto value = trim(value_part);

    if (key.empty()) {
      p.issue("", first, "missing key before '='");
      continue;
    }
    const auto handler = handlers.find(key);
    if (handler == handlers.end()) {
      p.issue(key, first, "unknown key");
      continue;
    }
    if (auto [it, inserted] = seen.emplace(key, p.line); !inserted) {
      p.issue(key, first, "duplicate key (first set on line " + std::to_string(it->second) + ")");
      continue;
    }
    if (value.empty()) {
      p.issue(key, value_col, "missing value");
      continue;
    }
    handler->second(value, value_col);
  }

  if (!p.issues.empty()) throw ConfigError(ErrorCode::parse_error, std::move(p.issues));

  std::vector<ConfigIssue> missing;
  if (!have_protocol) missing.push_back({"protocol", "required", 0, 0});
  if (!have_sizes) missing.push_back({"L", "required", 0, 0});
  if (!have_disorder) missing.push_back({"h", "required", 0, 0});
  if (!have_seed) missing.push_back({"seed", "required", 0, 0});
  auto issues = validate(cfg);
  missing.insert(missing.end(), issues.begin(), issues.end());
  if (!missing.empty()) throw ConfigError(ErrorCode::validation_error, std::move(missing));
  return cfg;
}

std::vector<ConfigIssue> validate(const ExperimentConfig& cfg) {
  std::vector<ConfigIssue> out;
  auto bad = [&](const std::string& field, const std::string& msg) { out.push_back({field, msg, 0, 0}); };

  if (cfg.sizes.empty()) bad("L", "at least one chain length is required");
  for (int l : cfg.sizes) {
    if (l < 3 || l > kMaxSites) {
      bad("L", "chain length " + std::to_string(l) + " outside [3, " + std::to_string(kMaxSites) + "]");
    } else if (binomial(l, default_sector_n_up(l)) > cfg.dimension_cap) {
      bad("L", "sector of L=" + std::to_string(l) + " exceeds dimension_cap " + std::to_string(cfg.dimension_cap));
    }
  }
  if (std::adjacent_find(cfg.sizes.begin(), cfg.sizes.end(), std::greater_equal<>()) != cfg.sizes.end())
    bad("L", "chain lengths must be strictly increasing");
  if (cfg.disorder.empty()) bad("h", "at least one disorder strength is required");
  for (double h : cfg.disorder)
    if (!(h >= 0.0)) bad("h", "disorder strength must be >= 0, got " + format_real(h));
  if (std::adjacent_find(cfg.disorder.begin(), cfg.disorder.end(), std::greater_equal<>()) != cfg.disorder.end())
    bad("h", "disorder grid must be strictly increasing");
  if (cfg.epsilons.empty()) bad("epsilon", "at least one value is required");
  for (double e : cfg.epsilons)
    if (!(e >= 0.0 && e <= 1.0)) bad("epsilon", "normalized energy must lie in [0, 1], got " + format_real(e));
  if (cfg.lambdas.empty()) bad("lambda", "at least one value is required");
  for (double l : cfg.lambdas)
    if (!(l >= 0.0)) bad("lambda", "must be >= 0, got " + format_real(l));
  if (!std::isfinite(cfg.t)) bad("t", "must be finite");
  if (cfg.realizations < 1) bad("realizations", "must be >= 1");
  if (cfg.fragment_samples < 1) bad("fragment_samples", "must be >= 1");
  if (!(cfg.krylov_tol > 0.0)) bad("krylov_tol", "must be > 0");
  if (cfg.krylov_dim < 2) bad("krylov_dim", "must be >= 2");
  if (cfg.krylov_max_steps < 1) bad("krylov_max_steps", "must be >= 1");
  if (!(cfg.entropy_threshold >= 0.0)) bad("entropy_threshold", "must be >= 0");
  if (!(cfg.initial_disorder >= 0.0)) bad("initial_h", "must be >= 0");
  if (!(cfg.initial_epsilon >= 0.0 && cfg.initial_epsilon <= 1.0)) bad("initial_epsilon", "must lie in [0, 1]");
  const auto& g = cfg.collapse_grid;
  if (!(g.hc_step > 0.0) || g.hc_max < g.hc_min) bad("collapse_hc", "needs min <= max and step > 0");
  if (!(g.nu_step > 0.0) || g.nu_max < g.nu_min || !(g.nu_min > 0.0)) bad("collapse_nu", "needs 0 < min <= max and step > 0");
  if (cfg.output_dir.empty()) bad("output_dir", "must not be empty");

  auto single = [&](const char* field, std::size_t n) {
    if (n != 1) bad(field, std::string("protocol ") + std::string(to_string(cfg.protocol)) + " takes a single value");
  };
  switch (cfg.protocol) {
    case Protocol::redundancy_curve:
      single("L", cfg.sizes.size());
      single("epsilon", cfg.epsilons.size());
      single("lambda", cfg.lambdas.size());
      break;
    case Protocol::lr_sweep:
    case Protocol::ee_sweep:
      single("epsilon", cfg.epsilons.size());
      single("lambda", cfg.lambdas.size());
      break;
    case Protocol::collapse:
      single("epsilon", cfg.epsilons.size());
      single("lambda", cfg.lambdas.size());
      if (cfg.sizes.size() < 2) bad("L", "collapse needs at least two chain lengths");
      break;
    case Protocol::mobility_edge:
      single("lambda", cfg.lambdas.size());
      if (cfg.sizes.size() < 2) bad("L", "mobility-edge needs at least two chain lengths");
      break;
    case Protocol::lambda_sweep:
    case Protocol::fixed_initial_sweep:
      break;
  }
  return out;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const auto ints = [](int v) { return std::to_string(v); };
  out << "protocol = " << to_string(cfg.protocol) << '\n';
  out << "L = " << format_list(cfg.sizes, ints) << '\n';
  out << "h = " << format_list(cfg.disorder, format_real) << '\n';
  out << "epsilon = " << format_list(cfg.epsilons, format_real) << '\n';
  out << "lambda = " << format_list(cfg.lambdas, format_real) << '\n';
  out << "t = " << format_real(cfg.t) << '\n';
  out << "realizations = " << cfg.realizations << '\n';
  out << "seed = " << cfg.master_seed << '\n';
  out << "fragment_mode = "
      << (cfg.fragment_mode == FragmentMode::automatic ? "auto"
          : cfg.fragment_mode == FragmentMode::exact   ? "exact"
                                                       : "sampled")
      << '\n';
  out << "fragment_exact_limit = " << cfg.fragment_exact_limit << '\n';
  out << "fragment_samples = " << cfg.fragment_samples << '\n';
  out << "krylov_tol = " << format_real(cfg.krylov_tol) << '\n';
  out << "krylov_dim = " << cfg.krylov_dim << '\n';
  out << "krylov_max_steps = " << cfg.krylov_max_steps << '\n';
  out << "dimension_cap = " << cfg.dimension_cap << '\n';
  out << "entropy_threshold = " << format_real(cfg.entropy_threshold) << '\n';
  out << "evolution_fields = " << (cfg.evolution_fields == EvolutionFields::same ? "same" : "fresh") << '\n';
  out << "initial_h = " << format_real(cfg.initial_disorder) << '\n';
  out << "initial_epsilon = " << format_real(cfg.initial_epsilon) << '\n';
  out << "bootstrap_resamples = " << cfg.bootstrap_resamples << '\n';
  const auto& g = cfg.collapse_grid;
  out << "collapse_hc = " << format_real(g.hc_min) << ':' << format_real(g.hc_max) << ':' << format_real(g.hc_step)
      << '\n';
  out << "collapse_nu = " << format_real(g.nu_min) << ':' << format_real(g.nu_max) << ':' << format_real(g.nu_step)
      << '\n';
  out << "output_dir = " << cfg.output_dir << '\n';
  return out.str();
}

SimulationSettings settings_from(const ExperimentConfig& cfg) {
  SimulationSettings s;
  s.fragments.sample_cap = cfg.fragment_samples;
  switch (cfg.fragment_mode) {
    case FragmentMode::automatic: s.fragments.exact_limit = cfg.fragment_exact_limit; break;
    case FragmentMode::exact: s.fragments.exact_limit = ~std::uint64_t{0}; break;
    case FragmentMode::sampled: s.fragments.exact_limit = 0; break;
  }
  s.fragments.seed = cfg.master_seed;
  s.krylov.tol = cfg.krylov_tol;
  s.krylov.subspace_dim = cfg.krylov_dim;
  s.krylov.max_steps = cfg.krylov_max_steps;
  s.dimension_cap = cfg.dimension_cap;
  s.entropy_threshold = cfg.entropy_threshold;
  return s;
}

}  // namespace dmbl
