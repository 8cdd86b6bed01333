/* C interface to the satisfiability filter library. */
#ifndef SATF_H
#define SATF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SATF_API __declspec(dllexport)
#elif defined(__GNUC__)
#define SATF_API __attribute__((visibility("default")))
#else
#define SATF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum satf_status {
  SATF_OK = 0,
  SATF_INVALID_ARGUMENT = 1,
  SATF_INVALID_DIMENSION = 2,
  SATF_DIMENSION_MISMATCH = 3,
  SATF_PARSE_ERROR = 4,
  SATF_SIZE_CAP = 5,
  SATF_NON_SATISFYING_SOLUTION = 6,
  SATF_DUPLICATE_SOLUTION = 7,
  SATF_DOMAIN_ERROR = 8,
  SATF_IO_ERROR = 9,
  SATF_PROCESS_FAILURE = 10,
  SATF_VALIDATION_FAILURE = 11,
  SATF_INSUFFICIENT_SOLUTIONS = 12,
  SATF_SCHEDULE_MISMATCH = 13,
  SATF_EMPTY_GRID = 14,
  SATF_MISSING_ORACLE = 15,
  SATF_INTERNAL = 99
} satf_status;

typedef struct satf_instance satf_instance;
typedef struct satf_config satf_config;
typedef struct satf_filter satf_filter;
typedef struct satf_census satf_census;

SATF_API const char* satf_version(void);
SATF_API const char* satf_status_string(satf_status status);
/* Message of the last failed call on this thread; "" after success. */
SATF_API const char* satf_last_error(void);
/* Frees strings returned through char** out-parameters. */
SATF_API void satf_string_free(char* s);

SATF_API double satf_efficiency_from_alpha(uint32_t k, double alpha);
SATF_API double satf_fpr_independent(uint32_t k, uint64_t s);
SATF_API satf_status satf_clauses_for_efficiency(uint32_t n, uint32_t k, double efficiency, uint64_t* m);
/* UINT64_MAX when p <= 0. */
SATF_API uint64_t satf_runs_needed_99(double p);

/* Instances */
SATF_API satf_status satf_instance_generate(uint32_t n, uint32_t k, uint64_t m, uint64_t seed, satf_instance** out);
SATF_API satf_status satf_instance_parse_dimacs(const char* text, satf_instance** out);
SATF_API satf_status satf_instance_load(const char* path, satf_instance** out);
SATF_API satf_status satf_instance_save(const satf_instance* instance, const char* path);
SATF_API satf_status satf_instance_to_dimacs(const satf_instance* instance, char** text);
SATF_API void satf_instance_free(satf_instance* instance);
SATF_API uint32_t satf_instance_n(const satf_instance* instance);
SATF_API uint32_t satf_instance_k(const satf_instance* instance);
SATF_API uint64_t satf_instance_m(const satf_instance* instance);
/* Unsatisfied clauses of the assignment given as a hex string. */
SATF_API satf_status satf_instance_energy(const satf_instance* instance, const char* hex, uint64_t* energy);
/* All solutions as newline-separated hex strings (n <= 30). */
SATF_API satf_status satf_instance_enumerate(const satf_instance* instance, char** hex_lines, uint64_t* count);
/* Writes count DIMACS instances with sidecars and a manifest into dir. */
SATF_API satf_status satf_generate_batch(uint32_t n, uint32_t k, uint64_t m, size_t count, uint64_t seed,
                                         const char* dir);

/* Solver configurations (JSON with a "solver" field: sa, sqa or ws) */
SATF_API satf_status satf_config_parse(const char* json, satf_config** out);
SATF_API satf_status satf_config_load(const char* path, satf_config** out);
SATF_API satf_status satf_config_to_json(const satf_config* config, char** json);
/* "sa", "sqa" or "ws". */
SATF_API const char* satf_config_solver(const satf_config* config);
SATF_API void satf_config_free(satf_config* config);

/* One run. assignment_hex may be NULL. */
SATF_API satf_status satf_solve(const satf_instance* instance, const satf_config* config, uint64_t seed,
                                char** assignment_hex, uint64_t* energy, int* satisfied);
/* runs census records as JSON lines, seeded by the census seed rule. */
SATF_API satf_status satf_solve_runs(const satf_instance* instance, const satf_config* config,
                                     uint32_t instance_index, uint64_t runs, uint64_t master_seed, char** jsonl);

/* Filters */
SATF_API satf_status satf_filter_build(const char* const* elements, size_t count, uint32_t n, uint32_t k,
                                       uint64_t hash_seed, uint64_t family_index, const satf_config* config,
                                       size_t solutions, uint64_t seed, size_t max_runs, satf_filter** out);
SATF_API satf_status satf_filter_load(const char* path, satf_filter** out);
SATF_API satf_status satf_filter_save(const satf_filter* filter, const char* path);
/* *maybe is 1 for "maybe in set", 0 for "definitely not". */
SATF_API satf_status satf_filter_query(const satf_filter* filter, const void* element, size_t length, int* maybe);
SATF_API satf_status satf_filter_metrics_json(const satf_filter* filter, char** json);
SATF_API void satf_filter_free(satf_filter* filter);

/* Censuses. instance_count 0 infers it from the largest instance index. */
SATF_API satf_status satf_census_parse(const char* jsonl, size_t instance_count, satf_census** out);
SATF_API satf_status satf_census_load(const char* path, size_t instance_count, satf_census** out);
SATF_API size_t satf_census_instance_count(const satf_census* census);
SATF_API uint64_t satf_census_total_runs(const satf_census* census);
SATF_API satf_status satf_census_validate(const satf_census* census, const satf_instance* const* instances,
                                          size_t count);
SATF_API void satf_census_free(satf_census* census);

/* Runs a named analysis and returns CSV. Analyses: distinct-curve,
 * fpr-curve, efficiency-curve, hamming, hardness, mixing, prob-to-find,
 * cross-table. options_json may be NULL; recognized keys: solver, other,
 * selection, normalizer, fraction, s_max, resamples, seed, percentiles. */
SATF_API satf_status satf_analyze(const satf_census* census, const satf_instance* const* instances, size_t count,
                                  const char* analysis, const char* options_json, char** csv);

/* Experiment pipeline. spec_json is an experiment description; results go to
 * out_dir. workers 0 uses SATF_WORKERS or the hardware concurrency. */
SATF_API satf_status satf_experiment_run(const char* spec_json, const char* out_dir, size_t workers);
/* Effort records as CSV; out_dir may be NULL. */
SATF_API satf_status satf_scaling_run(const char* spec_json, const char* out_dir, size_t workers, char** csv);

#ifdef __cplusplus
}
#endif

#endif
