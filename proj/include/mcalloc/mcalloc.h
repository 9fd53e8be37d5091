/*
 * Copyright 2026 The mcalloc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * mcalloc: allocation of a fixed Monte-Carlo sample budget across
 * Bonferroni-tested hypotheses.
 *
 * Every object is an opaque handle created by a *_create / solver call and
 * released with the matching *_destroy. Functions return an mcalloc_status;
 * on failure mcalloc_last_error() describes the problem. Error state is
 * per thread. Pointers returned by accessors are borrowed and stay valid
 * until the owning handle is destroyed.
 *
 * Hypothesis indices are 0-based in this API and 1-based in CSV files.
 */
#ifndef MCALLOC_H
#define MCALLOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MCALLOC_BUILDING_LIBRARY)
#    define MCALLOC_API __declspec(dllexport)
#  else
#    define MCALLOC_API __declspec(dllimport)
#  endif
#else
#  define MCALLOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcalloc_status {
  MCALLOC_OK = 0,
  MCALLOC_ERR_CONFIG = 1,
  MCALLOC_ERR_IO = 2,
  MCALLOC_ERR_INFEASIBLE = 3,
  MCALLOC_ERR_CONVERGENCE = 4,
  MCALLOC_ERR_DOMAIN = 5,
  MCALLOC_ERR_ORACLE = 6,
  MCALLOC_ERR_INTERNAL = 7
} mcalloc_status;

typedef enum mcalloc_estimator {
  MCALLOC_ESTIMATOR_RAW = 0,     /* S/k <= alpha */
  MCALLOC_ESTIMATOR_PLUS_ONE = 1 /* (S+1)/(k+1) <= alpha */
} mcalloc_estimator;

typedef enum mcalloc_strategy {
  MCALLOC_STRATEGY_KT = 0,
  MCALLOC_STRATEGY_GREEDY = 1,
  MCALLOC_STRATEGY_THOMPSON = 2,
  MCALLOC_STRATEGY_CONSTANT = 3,
  MCALLOC_STRATEGY_EXTERNAL = 4 /* read from a file or rounded */
} mcalloc_strategy;

MCALLOC_API const char* mcalloc_version(void);
MCALLOC_API const char* mcalloc_rng_id(void);
MCALLOC_API const char* mcalloc_last_error(void);
/* Minimum feasible budget carried by the last MCALLOC_ERR_INFEASIBLE. */
MCALLOC_API int64_t mcalloc_last_minimum_budget(void);

/* ---- p-value sets ------------------------------------------------------ */

typedef struct mcalloc_pvalues mcalloc_pvalues;

typedef struct mcalloc_mixture_config {
  size_t m;
  double pi0;
  double beta_shape1;
  double beta_shape2;
  uint64_t seed;
  int sort_output;
} mcalloc_mixture_config;

/* m = 500, pi0 = 0.5, Beta(0.25, 25), seed 0, sorted. */
MCALLOC_API void mcalloc_mixture_config_init(mcalloc_mixture_config* cfg);

MCALLOC_API mcalloc_status mcalloc_pvalues_create(const double* values, size_t m, double alpha,
                                                  mcalloc_pvalues** out);
MCALLOC_API mcalloc_status mcalloc_pvalues_generate(const mcalloc_mixture_config* cfg, double alpha,
                                                    mcalloc_pvalues** out);
MCALLOC_API mcalloc_status mcalloc_pvalues_read_csv(const char* path, double alpha, mcalloc_pvalues** out);
MCALLOC_API mcalloc_status mcalloc_pvalues_write_csv(const mcalloc_pvalues* p, const char* path);
MCALLOC_API void mcalloc_pvalues_destroy(mcalloc_pvalues* p);

MCALLOC_API size_t mcalloc_pvalues_size(const mcalloc_pvalues* p);
MCALLOC_API double mcalloc_pvalues_alpha(const mcalloc_pvalues* p);
MCALLOC_API const double* mcalloc_pvalues_data(const mcalloc_pvalues* p);

/* alpha = alpha_star / m */
MCALLOC_API mcalloc_status mcalloc_alpha_from_star(double alpha_star, size_t m, double* alpha);

/* Writes at most `capacity` rejected indices; *count receives the full count. */
MCALLOC_API mcalloc_status mcalloc_bonferroni(const mcalloc_pvalues* p, size_t* indices, size_t capacity,
                                              size_t* count);

/* ---- objectives ------------------------------------------------------- */

MCALLOC_API mcalloc_status mcalloc_g_i(double p, double alpha, int64_t k, double* out);
MCALLOC_API mcalloc_status mcalloc_h_i(double p, double alpha, double k, double* out);
MCALLOC_API mcalloc_status mcalloc_dh_dk(double p, double alpha, double k, double* out);
MCALLOC_API mcalloc_status mcalloc_objective_g(const mcalloc_pvalues* p, const int64_t* k, size_t m, double* value);
MCALLOC_API mcalloc_status mcalloc_objective_h(const mcalloc_pvalues* p, const double* k, size_t m, double* value);

/* ---- allocations ------------------------------------------------------ */

typedef struct mcalloc_allocation mcalloc_allocation;

typedef struct mcalloc_kt_options {
  double degeneracy_eps;
  double stationarity_tol;
  int max_outer_iterations;
  int max_inner_iterations;
} mcalloc_kt_options;

MCALLOC_API void mcalloc_kt_options_init(mcalloc_kt_options* opts);

typedef struct mcalloc_kt_info {
  double budget;
  double lambda_star;
  double stationarity_residual;
  int iterations_outer;
  long long iterations_inner_total;
  size_t degenerate_count;
} mcalloc_kt_info;

typedef struct mcalloc_greedy_info {
  int64_t iterations;
  int64_t unspent_budget;
  int64_t jump;
  int saturated;
  int literal_argmax;
  double objective;
} mcalloc_greedy_info;

typedef struct mcalloc_thompson_config {
  int64_t total_budget;
  int64_t iterations;
  int64_t posterior_draws;
  uint64_t seed;
  int warm_up;
  unsigned threads; /* 0 = available parallelism */
} mcalloc_thompson_config;

/* it = 1000, d = 100, no warm-up, one thread. */
MCALLOC_API void mcalloc_thompson_config_init(mcalloc_thompson_config* cfg);

/* Returns the exceedance count among n fresh samples for hypothesis `index`
 * in *exceedances. `stream_seed` is a deterministic per-query seed. Non-zero
 * return values abort the run with MCALLOC_ERR_ORACLE. */
typedef int (*mcalloc_oracle_fn)(void* user, size_t index, int64_t n, uint64_t stream_seed, int64_t* exceedances);

/* Continuous Kuhn-Tucker optimum of the normal-approximate objective. opts may be NULL. */
MCALLOC_API mcalloc_status mcalloc_kt_solve(const mcalloc_pvalues* p, double K, const mcalloc_kt_options* opts,
                                            mcalloc_allocation** out);
MCALLOC_API mcalloc_status mcalloc_greedy_allocate(const mcalloc_pvalues* p, int64_t K, int literal_argmax,
                                                   mcalloc_allocation** out);
MCALLOC_API mcalloc_status mcalloc_thompson_run_simulated(const mcalloc_pvalues* p,
                                                          const mcalloc_thompson_config* cfg,
                                                          mcalloc_allocation** out);
MCALLOC_API mcalloc_status mcalloc_thompson_run(size_t m, double alpha, const mcalloc_thompson_config* cfg,
                                                mcalloc_oracle_fn oracle, void* user, mcalloc_allocation** out);
MCALLOC_API mcalloc_status mcalloc_constant_allocate(size_t m, int64_t K, mcalloc_allocation** out);
/* Largest-remainder rounding to integers summing to `total`. */
MCALLOC_API mcalloc_status mcalloc_allocation_round(const mcalloc_allocation* a, int64_t total,
                                                    mcalloc_allocation** out);
MCALLOC_API mcalloc_status mcalloc_allocation_read_csv(const char* path, mcalloc_allocation** out);
MCALLOC_API void mcalloc_allocation_destroy(mcalloc_allocation* a);

MCALLOC_API mcalloc_strategy mcalloc_allocation_strategy(const mcalloc_allocation* a);
MCALLOC_API size_t mcalloc_allocation_size(const mcalloc_allocation* a);
MCALLOC_API int mcalloc_allocation_is_discrete(const mcalloc_allocation* a);
MCALLOC_API const double* mcalloc_allocation_budgets(const mcalloc_allocation* a);
MCALLOC_API double mcalloc_allocation_total(const mcalloc_allocation* a);
/* Strategy-specific run metadata as a JSON object. */
MCALLOC_API const char* mcalloc_allocation_metadata_json(const mcalloc_allocation* a);

/* Each returns MCALLOC_ERR_CONFIG if the allocation came from another strategy. */
MCALLOC_API mcalloc_status mcalloc_allocation_kt_info(const mcalloc_allocation* a, mcalloc_kt_info* info);
MCALLOC_API mcalloc_status mcalloc_allocation_greedy_info(const mcalloc_allocation* a, mcalloc_greedy_info* info);
/* Thompson runs: exceedance counts and iteration-averaged instability weights (length m). */
MCALLOC_API const int64_t* mcalloc_allocation_exceedances(const mcalloc_allocation* a);
MCALLOC_API const double* mcalloc_allocation_mean_weights(const mcalloc_allocation* a);

/* CSV in the schema of the producing strategy:
 *   kt        index,p_value,k_continuous
 *   thompson  index,k_discrete,s,p_hat_plus_one
 *   others    index,p_value,k_discrete (k_continuous if not integral)
 * p may be NULL for Thompson allocations. */
MCALLOC_API mcalloc_status mcalloc_allocation_write_csv(const mcalloc_allocation* a, const mcalloc_pvalues* p,
                                                        const char* path);

/* ---- experiments ------------------------------------------------------ */

typedef struct mcalloc_protocol_config {
  size_t repetitions;
  uint64_t seed;
  int64_t iterations;
  int64_t posterior_draws;
  int warm_up;
  mcalloc_estimator estimator;
  unsigned threads;
} mcalloc_protocol_config;

/* r = 10, seed 0, it = 1000, d = 100, plus-one estimator, one thread. */
MCALLOC_API void mcalloc_protocol_config_init(mcalloc_protocol_config* cfg);

/* counts must hold r entries. The allocation must be discrete. */
MCALLOC_API mcalloc_status mcalloc_empirical_misclassifications(const mcalloc_pvalues* p,
                                                                const mcalloc_allocation* a, size_t r,
                                                                uint64_t seed, mcalloc_estimator estimator,
                                                                unsigned threads, int64_t* counts);

typedef struct mcalloc_report mcalloc_report;

/* KT (continuous for h, rounded for the empirical runs), Thompson, and the
 * constant baseline, in that order. */
MCALLOC_API mcalloc_status mcalloc_table1(const mcalloc_pvalues* p, int64_t K, const mcalloc_protocol_config* cfg,
                                          mcalloc_report** out);
/* Scores one precomputed allocation. Continuous allocations are rounded to
 * floor(total) for the empirical runs. */
MCALLOC_API mcalloc_status mcalloc_evaluate(const mcalloc_pvalues* p, const mcalloc_allocation* a,
                                            mcalloc_strategy label, const mcalloc_protocol_config* cfg,
                                            mcalloc_report** out);
MCALLOC_API void mcalloc_report_destroy(mcalloc_report* r);
MCALLOC_API size_t mcalloc_report_count(const mcalloc_report* r);
MCALLOC_API double mcalloc_report_theoretical(const mcalloc_report* r, size_t i);
MCALLOC_API double mcalloc_report_empirical_mean(const mcalloc_report* r, size_t i);
MCALLOC_API const char* mcalloc_report_strategy_name(const mcalloc_report* r, size_t i);
/* Allocation the i-th report was computed from. */
MCALLOC_API const mcalloc_allocation* mcalloc_report_allocation(const mcalloc_report* r, size_t i);
MCALLOC_API mcalloc_status mcalloc_report_set_allocation_file(mcalloc_report* r, size_t i, const char* path);
MCALLOC_API const char* mcalloc_report_json(const mcalloc_report* r, size_t i);

typedef struct mcalloc_convergence_point {
  int64_t K;
  double q05;
  double q50;
  double q95;
  double theoretical_correct;
} mcalloc_convergence_point;

/* *count receives the grid length; out must hold `steps` entries. */
MCALLOC_API mcalloc_status mcalloc_log_grid(int64_t lo, int64_t hi, size_t steps, int64_t* out, size_t* count);
MCALLOC_API mcalloc_status mcalloc_convergence_study(const mcalloc_pvalues* p, const int64_t* grid, size_t n,
                                                     const mcalloc_protocol_config* cfg,
                                                     mcalloc_convergence_point* out);
MCALLOC_API mcalloc_status mcalloc_write_convergence_csv(const char* path, const mcalloc_convergence_point* pts,
                                                         size_t n);

/* g_i on k = 0..k_max; out must hold k_max + 1 entries. */
MCALLOC_API mcalloc_status mcalloc_profile_g(double p, double alpha, int64_t k_max, double* out);
MCALLOC_API mcalloc_status mcalloc_write_profile_csv(const char* path, const double* g, int64_t k_max);

MCALLOC_API mcalloc_status mcalloc_write_text(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif /* MCALLOC_H */
