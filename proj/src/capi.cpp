#include "darwin_mbl/darwin_mbl.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "analysis.hpp"
#include "config.hpp"
#include "runner.hpp"
#include "version.hpp"

struct dmbl_config {
  dmbl::ExperimentConfig value;
};

struct dmbl_realization {
  dmbl::RealizationRecord record;
  int sites = 0;
};

namespace {

thread_local std::string last_error;

dmbl_status status_of(dmbl::ErrorCode code) {
  using dmbl::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_arguments: return DMBL_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return DMBL_ERR_DIMENSION_MISMATCH;
    case ErrorCode::dimension_cap_exceeded: return DMBL_ERR_DIMENSION_CAP_EXCEEDED;
    case ErrorCode::degenerate_spectrum_width: return DMBL_ERR_DEGENERATE_SPECTRUM_WIDTH;
    case ErrorCode::non_convergence: return DMBL_ERR_NON_CONVERGENCE;
    case ErrorCode::invalid_site_set: return DMBL_ERR_INVALID_SITE_SET;
    case ErrorCode::sample_count_exceeds_population: return DMBL_ERR_SAMPLE_COUNT;
    case ErrorCode::degenerate_system_entropy: return DMBL_ERR_DEGENERATE_SYSTEM_ENTROPY;
    case ErrorCode::no_crossing_in_range: return DMBL_ERR_NO_CROSSING;
    case ErrorCode::insufficient_overlap: return DMBL_ERR_INSUFFICIENT_OVERLAP;
    case ErrorCode::parse_error: return DMBL_ERR_PARSE;
    case ErrorCode::validation_error: return DMBL_ERR_VALIDATION;
    case ErrorCode::io_error: return DMBL_ERR_IO;
  }
  return DMBL_ERR_INTERNAL;
}

dmbl_status fail_with(dmbl_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename Body>
dmbl_status guard(Body&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const dmbl::Error& e) {
    return fail_with(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(DMBL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(DMBL_ERR_INTERNAL, e.what());
  }
}

void copy_path(char (&dst)[4096], const std::string& src) {
  const auto n = std::min(src.size(), sizeof dst - 1);
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

}  // namespace

extern "C" {

const char* dmbl_last_error(void) { return last_error.c_str(); }

const char* dmbl_version(void) { return dmbl::kVersion; }

const char* dmbl_status_name(dmbl_status status) {
  switch (status) {
    case DMBL_OK: return "ok";
    case DMBL_PARTIAL: return "partial";
    case DMBL_ERR_INTERNAL: return "internal-error";
    default: break;
  }
  for (int c = 0; c <= static_cast<int>(dmbl::ErrorCode::io_error); ++c) {
    const auto code = static_cast<dmbl::ErrorCode>(c);
    if (status_of(code) == status) return dmbl::to_string(code).data();
  }
  return "unknown";
}

dmbl_status dmbl_config_parse(const char* text, dmbl_config** out) {
  if (!text || !out) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    *out = new dmbl_config{dmbl::parse_config(text)};
    return DMBL_OK;
  });
}

dmbl_status dmbl_config_load(const char* path, dmbl_config** out) {
  if (!path || !out) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail_with(DMBL_ERR_IO, std::string("cannot read config ") + path);
  std::ostringstream text;
  text << in.rdbuf();
  return dmbl_config_parse(text.str().c_str(), out);
}

void dmbl_config_free(dmbl_config* config) { delete config; }

dmbl_status dmbl_config_set_seed(dmbl_config* config, uint64_t seed) {
  if (!config) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "null config");
  config->value.master_seed = seed;
  last_error.clear();
  return DMBL_OK;
}

dmbl_status dmbl_config_set_output_dir(dmbl_config* config, const char* dir) {
  if (!config || !dir || !*dir) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "null config or empty directory");
  config->value.output_dir = dir;
  last_error.clear();
  return DMBL_OK;
}

const char* dmbl_config_protocol(const dmbl_config* config) {
  if (!config) return "";
  return dmbl::to_string(config->value.protocol).data();
}

dmbl_status dmbl_config_serialize(const dmbl_config* config, char** out) {
  if (!config || !out) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    const auto text = dmbl::serialize_config(config->value);
    auto* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
    return DMBL_OK;
  });
}

void dmbl_string_free(char* text) { delete[] text; }

dmbl_status dmbl_run(const dmbl_config* config, const dmbl_run_options* options, dmbl_run_report* report) {
  if (!config) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "null config");
  return guard([&] {
    dmbl::RunOptions opts;
    if (options) {
      opts.threads = std::max(1, options->threads);
      opts.overwrite = options->overwrite != 0;
    }
    const auto outcome = dmbl::run(config->value, opts);
    if (report) {
      report->hard_failures = outcome.hard_failures;
      report->soft_failures = outcome.soft_failures;
      report->wall_seconds = outcome.wall_seconds;
      copy_path(report->results_path, outcome.results_path.string());
      copy_path(report->manifest_path, outcome.manifest_path.string());
    }
    if (outcome.status == dmbl::RunStatus::partial)
      return fail_with(DMBL_PARTIAL, std::to_string(outcome.hard_failures) + " realizations failed; see manifest");
    return DMBL_OK;
  });
}

void dmbl_realization_params_default(dmbl_realization_params* params) {
  if (!params) return;
  const dmbl::RealizationConfig d;
  params->sites = d.sites;
  params->disorder = d.disorder;
  params->epsilon = d.epsilon;
  params->lambda = d.lambda;
  params->t = d.t;
  params->fresh_evolution_fields = 0;
  params->evolution_disorder = 0.0;
}

dmbl_status dmbl_realization_run(const dmbl_realization_params* params, uint64_t seed, dmbl_realization** out) {
  if (!params || !out) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    dmbl::RealizationConfig cfg;
    cfg.sites = params->sites;
    cfg.disorder = params->disorder;
    cfg.epsilon = params->epsilon;
    cfg.lambda = params->lambda;
    cfg.t = params->t;
    if (params->fresh_evolution_fields) cfg.evolution_disorder = params->evolution_disorder;
    if (cfg.sites < 3 || cfg.sites > dmbl::kMaxSites) dmbl::fail(dmbl::ErrorCode::invalid_arguments, "L out of range");
    auto* r = new dmbl_realization{dmbl::run_realization(cfg, seed), cfg.sites};
    *out = r;
    return DMBL_OK;
  });
}

void dmbl_realization_free(dmbl_realization* realization) { delete realization; }

int dmbl_realization_sites(const dmbl_realization* r) { return r ? r->sites : 0; }

double dmbl_realization_epsilon(const dmbl_realization* r) { return r ? r->record.epsilon_achieved : 0.0; }

double dmbl_realization_entanglement_entropy(const dmbl_realization* r) {
  return r ? r->record.entanglement_entropy : 0.0;
}

void dmbl_realization_decoherence(const dmbl_realization* r, double* r_real, double* r_imag) {
  if (!r) return;
  if (r_real) *r_real = r->record.r.real();
  if (r_imag) *r_imag = r->record.r.imag();
}

double dmbl_realization_purity(const dmbl_realization* r) { return r ? r->record.purity : 0.0; }

double dmbl_realization_system_entropy(const dmbl_realization* r) { return r ? r->record.system_entropy : 0.0; }

dmbl_status dmbl_realization_lack_of_redundancy(const dmbl_realization* r, double* out) {
  if (!r || !out) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "null argument");
  if (!r->record.lack_of_redundancy) return fail_with(DMBL_ERR_DEGENERATE_SYSTEM_ENTROPY, r->record.failure_message);
  *out = *r->record.lack_of_redundancy;
  last_error.clear();
  return DMBL_OK;
}

dmbl_status dmbl_realization_mutual_information(const dmbl_realization* r, double* out, size_t capacity) {
  if (!r || !out) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "null argument");
  if (r->record.mi_avg.empty()) return fail_with(DMBL_ERR_DEGENERATE_SYSTEM_ENTROPY, r->record.failure_message);
  if (capacity < r->record.mi_avg.size()) return fail_with(DMBL_ERR_INVALID_ARGUMENT, "output buffer too small");
  std::copy(r->record.mi_avg.begin(), r->record.mi_avg.end(), out);
  last_error.clear();
  return DMBL_OK;
}

}  // extern "C"
