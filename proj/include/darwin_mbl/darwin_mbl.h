#ifndef DARWIN_MBL_H
#define DARWIN_MBL_H

#include <stddef.h>
#include <stdint.h>

#if defined(DMBL_BUILDING_LIBRARY)
#define DMBL_API __attribute__((visibility("default")))
#else
#define DMBL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmbl_status {
  DMBL_OK = 0,
  DMBL_ERR_INVALID_ARGUMENT = 1,
  DMBL_ERR_DIMENSION_MISMATCH = 2,
  DMBL_ERR_DIMENSION_CAP_EXCEEDED = 3,
  DMBL_ERR_DEGENERATE_SPECTRUM_WIDTH = 4,
  DMBL_ERR_NON_CONVERGENCE = 5,
  DMBL_ERR_INVALID_SITE_SET = 6,
  DMBL_ERR_SAMPLE_COUNT = 7,
  DMBL_ERR_DEGENERATE_SYSTEM_ENTROPY = 8,
  DMBL_ERR_NO_CROSSING = 9,
  DMBL_ERR_INSUFFICIENT_OVERLAP = 10,
  DMBL_ERR_PARSE = 11,
  DMBL_ERR_VALIDATION = 12,
  DMBL_ERR_IO = 13,
  DMBL_ERR_INTERNAL = 14,
  /* dmbl_run finished but some realizations failed; results were written. */
  DMBL_PARTIAL = 15
} dmbl_status;

typedef struct dmbl_config dmbl_config;
typedef struct dmbl_realization dmbl_realization;

/* Message of the last failed call on this thread; empty after success. */
DMBL_API const char* dmbl_last_error(void);
DMBL_API const char* dmbl_version(void);
DMBL_API const char* dmbl_status_name(dmbl_status status);

DMBL_API dmbl_status dmbl_config_parse(const char* text, dmbl_config** out);
DMBL_API dmbl_status dmbl_config_load(const char* path, dmbl_config** out);
DMBL_API void dmbl_config_free(dmbl_config* config);
DMBL_API dmbl_status dmbl_config_set_seed(dmbl_config* config, uint64_t seed);
DMBL_API dmbl_status dmbl_config_set_output_dir(dmbl_config* config, const char* dir);
DMBL_API const char* dmbl_config_protocol(const dmbl_config* config);
/* Caller releases the string with dmbl_string_free. */
DMBL_API dmbl_status dmbl_config_serialize(const dmbl_config* config, char** out);
DMBL_API void dmbl_string_free(char* text);

typedef struct dmbl_run_options {
  int threads;
  int overwrite;
} dmbl_run_options;

typedef struct dmbl_run_report {
  size_t hard_failures;
  size_t soft_failures;
  double wall_seconds;
  char results_path[4096];
  char manifest_path[4096];
} dmbl_run_report;

/* report may be NULL. Returns DMBL_PARTIAL when hard failures were recorded. */
DMBL_API dmbl_status dmbl_run(const dmbl_config* config, const dmbl_run_options* options, dmbl_run_report* report);

typedef struct dmbl_realization_params {
  int sites;
  double disorder;
  double epsilon;
  double lambda;
  double t;
  /* Evolve with freshly drawn fields at evolution_disorder when nonzero. */
  int fresh_evolution_fields;
  double evolution_disorder;
} dmbl_realization_params;

DMBL_API void dmbl_realization_params_default(dmbl_realization_params* params);
DMBL_API dmbl_status dmbl_realization_run(const dmbl_realization_params* params, uint64_t seed,
                                          dmbl_realization** out);
DMBL_API void dmbl_realization_free(dmbl_realization* realization);
DMBL_API int dmbl_realization_sites(const dmbl_realization* realization);
DMBL_API double dmbl_realization_epsilon(const dmbl_realization* realization);
DMBL_API double dmbl_realization_entanglement_entropy(const dmbl_realization* realization);
DMBL_API void dmbl_realization_decoherence(const dmbl_realization* realization, double* r_real, double* r_imag);
DMBL_API double dmbl_realization_purity(const dmbl_realization* realization);
DMBL_API double dmbl_realization_system_entropy(const dmbl_realization* realization);
/* DMBL_ERR_DEGENERATE_SYSTEM_ENTROPY when the redundancy measure is undefined. */
DMBL_API dmbl_status dmbl_realization_lack_of_redundancy(const dmbl_realization* realization, double* out);
/* Fills out[0..L-1] with the averaged mutual information for l = 1..L. */
DMBL_API dmbl_status dmbl_realization_mutual_information(const dmbl_realization* realization, double* out,
                                                         size_t capacity);

#ifdef __cplusplus
}
#endif

#endif
