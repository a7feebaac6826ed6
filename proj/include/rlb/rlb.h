#ifndef RLB_RLB_H
#define RLB_RLB_H

/*
 * C interface to the random-length Levy bridge library.
 *
 * Every fallible call returns an rlb_status. On failure the message is
 * available from rlb_last_error() on the calling thread until the next call
 * into the library on that thread. Handles are opaque; each *_create or
 * producing call transfers ownership to the caller, who releases it with the
 * matching *_free. Freeing NULL is a no-op. Strings returned through char**
 * are released with rlb_string_free.
 *
 * Handles are immutable after creation and may be shared across threads.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RLB_API __declspec(dllexport)
#else
#define RLB_API __attribute__((visibility("default")))
#endif

typedef enum rlb_status {
  RLB_OK = 0,
  RLB_ERR_INVALID_ARGUMENT = 1,
  RLB_ERR_PARAMETER_DOMAIN = 2,
  RLB_ERR_TAIL_NOT_DECAYED = 3,
  RLB_ERR_DENOMINATOR_UNDERFLOW = 4,
  RLB_ERR_TIME_ORDER = 5,
  RLB_ERR_ZERO_NORMALIZER = 6,
  RLB_ERR_INVALID_OBSERVATION = 7,
  RLB_ERR_GRID_MISMATCH = 8,
  RLB_ERR_ACCURACY = 9,
  RLB_ERR_IO = 10,
  RLB_ERR_INTERNAL = 11
} rlb_status;

typedef struct rlb_model rlb_model;
typedef struct rlb_law rlb_law;
typedef struct rlb_engine rlb_engine;
typedef struct rlb_table rlb_table;
typedef struct rlb_bridge rlb_bridge;
typedef struct rlb_random_bridge rlb_random_bridge;
typedef struct rlb_transition rlb_transition;
typedef struct rlb_paths rlb_paths;

RLB_API const char* rlb_version(void);
RLB_API const char* rlb_last_error(void);
RLB_API const char* rlb_status_name(rlb_status status);
RLB_API void rlb_string_free(char* s);

/* Models: "stable:alpha=1.5", "tempered:alpha=0.5,c=1,lambda=1",
   "mts:alpha=0.5", "nig", "gaussian:sigma=1", "cauchy". */
RLB_API rlb_status rlb_model_parse(const char* spec, rlb_model** out);
/* Canonical spec string, owned by the handle. */
RLB_API const char* rlb_model_spec(const rlb_model* model);
RLB_API rlb_status rlb_model_exponent(const rlb_model* model, double u, double* out);
RLB_API void rlb_model_free(rlb_model* model);

/* Length laws. JSON: {"atoms":[{"r":..,"p":..}],"density":{"grid":[..],"values":[..]}}. */
RLB_API rlb_status rlb_law_from_atoms(const double* r, const double* p, size_t n, rlb_law** out);
RLB_API rlb_status rlb_law_from_json(const char* json, rlb_law** out);
RLB_API rlb_status rlb_law_load(const char* path, rlb_law** out);
RLB_API rlb_status rlb_law_to_json(const rlb_law* law, char** out);
RLB_API rlb_status rlb_law_cdf(const rlb_law* law, double t, double* out);
RLB_API size_t rlb_law_atom_count(const rlb_law* law);
RLB_API rlb_status rlb_law_atom(const rlb_law* law, size_t i, double* r, double* p);
RLB_API void rlb_law_free(rlb_law* law);

/* Table plan overrides; a zero field keeps the automatic choice. */
typedef struct rlb_plan_options {
  double cutoff;
  size_t grid_points;
  double x_max;
} rlb_plan_options;

/* Density engine of one model with a table cache. options may be NULL. */
RLB_API rlb_status rlb_engine_create(const rlb_model* model, const rlb_plan_options* options, rlb_engine** out);
/* f_t(x) through the cached table. */
RLB_API rlb_status rlb_engine_density(const rlb_engine* engine, double t, double x, double* out);
/* f_t(x) by direct quadrature. */
RLB_API rlb_status rlb_engine_point(const rlb_engine* engine, double t, double x, double* out);
RLB_API rlb_status rlb_engine_table(const rlb_engine* engine, double t, rlb_table** out);
RLB_API void rlb_engine_free(rlb_engine* engine);

RLB_API double rlb_table_time(const rlb_table* table);
RLB_API double rlb_table_dx(const rlb_table* table);
/* Number of grid points, 2K + 1. */
RLB_API size_t rlb_table_size(const rlb_table* table);
/* Copies min(cap, size) points; x or f may be NULL. */
RLB_API size_t rlb_table_copy(const rlb_table* table, double* x, double* f, size_t cap);
RLB_API double rlb_table_mass(const rlb_table* table);
/* Tables sharing one plan, e.g. from rlb_engine_common_tables. */
RLB_API rlb_status rlb_table_convolve(const rlb_table* a, const rlb_table* b, rlb_table** out);
/* Tables for several times on a single plan (for convolution). */
RLB_API rlb_status rlb_engine_common_tables(const rlb_engine* engine, const double* times, size_t n,
                                            rlb_table** out);
RLB_API void rlb_table_free(rlb_table* table);

/* Bridge of fixed length r from 0 to z. */
RLB_API rlb_status rlb_bridge_create(const rlb_engine* engine, double r, double z, rlb_bridge** out);
RLB_API rlb_status rlb_bridge_transition_density(const rlb_bridge* bridge, double t, double x, double u, double y,
                                                 double* out);
/* Paths on times[0..n_times) (times[0] = 0, last <= r); path i uses a
   generator seeded from (seed, i), independent of `threads`. */
RLB_API rlb_status rlb_bridge_sample(const rlb_bridge* bridge, const double* times, size_t n_times, size_t n_paths,
                                     uint64_t seed, unsigned threads, rlb_paths** out);
RLB_API void rlb_bridge_free(rlb_bridge* bridge);

RLB_API size_t rlb_paths_count(const rlb_paths* paths);
RLB_API size_t rlb_paths_steps(const rlb_paths* paths);
RLB_API const double* rlb_paths_times(const rlb_paths* paths);
/* values and absorbed hold rlb_paths_steps() entries; any output may be NULL. */
RLB_API rlb_status rlb_paths_get(const rlb_paths* paths, size_t i, double* values, unsigned char* absorbed,
                                 double* realized_length);
RLB_API void rlb_paths_free(rlb_paths* paths);

/* Bridge from 0 to z whose length has the given law. */
RLB_API rlb_status rlb_random_bridge_create(const rlb_engine* engine, double z, const rlb_law* law,
                                            rlb_random_bridge** out);
RLB_API rlb_status rlb_random_bridge_phi(const rlb_random_bridge* rb, double r, double t, double x, double* out);
/* Posterior of the length given observations at increasing times;
   absorbed[i] != 0 marks the state z (values[i] is then ignored). */
RLB_API rlb_status rlb_random_bridge_posterior(const rlb_random_bridge* rb, const double* times,
                                               const double* values, const unsigned char* absorbed, size_t n,
                                               rlb_law** out);
/* Law of the state at u given the state at t; x == NULL is the absorbed state. */
RLB_API rlb_status rlb_random_bridge_transition(const rlb_random_bridge* rb, double t, const double* x, double u,
                                                rlb_transition** out);
RLB_API rlb_status rlb_random_bridge_conditional_expectation(const rlb_random_bridge* rb, double t, const double* x,
                                                             double u, double (*g)(double y, void* ctx),
                                                             void* ctx, double* out);
/* E[g(tau, state at u) | state at t = x] for an unabsorbed x. */
RLB_API rlb_status rlb_random_bridge_joint_conditional(const rlb_random_bridge* rb, double t, double x, double u,
                                                       double (*g)(double r, double y, void* ctx), void* ctx,
                                                       double* out);
RLB_API rlb_status rlb_random_bridge_sample(const rlb_random_bridge* rb, const double* times, size_t n_times,
                                            size_t n_paths, uint64_t seed, unsigned threads, rlb_paths** out);
RLB_API void rlb_random_bridge_free(rlb_random_bridge* rb);

RLB_API double rlb_transition_atom_mass(const rlb_transition* tr);
RLB_API size_t rlb_transition_size(const rlb_transition* tr);
/* Quadrature nodes, weights and continuous density; any output may be NULL. */
RLB_API size_t rlb_transition_copy(const rlb_transition* tr, double* y, double* w, double* density, size_t cap);
RLB_API rlb_status rlb_transition_density_at(const rlb_transition* tr, double y, double* out);
RLB_API rlb_status rlb_transition_to_json(const rlb_transition* tr, char** out);
RLB_API void rlb_transition_free(rlb_transition* tr);

/* Verification suite. models == NULL selects the default model list. */
typedef struct rlb_verify_options {
  uint64_t seed;
  const char* const* models;
  size_t n_models;
  size_t paths;
  unsigned threads;
  double density_scale;
} rlb_verify_options;

/* Fills defaults: seed 42, default models, 10000 paths, 1 thread, scale 1. */
RLB_API void rlb_verify_defaults(rlb_verify_options* options);
/* Runs every check; *report receives the JSON report, *passed 1 iff all pass. */
RLB_API rlb_status rlb_verify(const rlb_verify_options* options, char** report, int* passed);
RLB_API size_t rlb_check_manifest_size(void);
RLB_API const char* rlb_check_manifest_id(size_t i);

#ifdef __cplusplus
}
#endif

#endif
