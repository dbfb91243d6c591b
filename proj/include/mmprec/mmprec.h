/*
 * Copyright 2026 The mmprec Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of libmmprec: robust multi-user MISO precoder design from
 * LMMSE channel estimates, plus the Monte Carlo experiment commands.
 *
 * Conventions
 *   - Every function that can fail returns mmprec_status. On failure a
 *     description is available from mmprec_last_message() on the same thread.
 *   - Complex arrays are interleaved (re, im) doubles in column-major order;
 *     an R x C complex matrix occupies 2*R*C doubles.
 *   - Handles are opaque and owned by the caller; release them with the
 *     matching *_destroy function (NULL is accepted).
 */

#ifndef MMPREC_H
#define MMPREC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MMPREC_BUILDING)
#    define MMPREC_API __declspec(dllexport)
#  else
#    define MMPREC_API __declspec(dllimport)
#  endif
#else
#  define MMPREC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 0-3 double as CLI exit codes. */
typedef enum mmprec_status {
  MMPREC_OK = 0,
  MMPREC_ERR_CONFIG = 1,
  MMPREC_ERR_IO = 2,
  MMPREC_ERR_INTERNAL = 3,
  MMPREC_ERR_DEGENERATE = 4, /* rank-deficient estimate, zero forcing impossible */
  MMPREC_ERR_STALLED = 5,    /* every MM coefficient vanished */
  MMPREC_ERR_ARGUMENT = 6    /* NULL handle, bad index or size */
} mmprec_status;

typedef enum mmprec_solver {
  MMPREC_SOLVER_ZF = 0,
  MMPREC_SOLVER_MM_LB = 1,
  MMPREC_SOLVER_MM_LB_INST = 2,
  MMPREC_SOLVER_MM_BISEC = 3,
  MMPREC_SOLVER_MMPLUS = 4
} mmprec_solver;

typedef struct mmprec_solver_options {
  int max_iterations;
  int max_iterations_mmplus;
  double rel_tolerance;
  double bisection_tolerance;
  int bisection_max_steps;
  int treat_estimate_as_truth; /* nonzero: design with zero error covariance */
} mmprec_solver_options;

typedef struct mmprec_run_config mmprec_run_config;
typedef struct mmprec_problem mmprec_problem;
typedef struct mmprec_solution mmprec_solution;

MMPREC_API const char* mmprec_version(void);
/* Message of the last failing call, or summary of the last command. */
MMPREC_API const char* mmprec_last_message(void);
MMPREC_API const char* mmprec_status_string(mmprec_status status);

/* ---- solver options ---------------------------------------------------- */

MMPREC_API mmprec_solver_options mmprec_solver_options_default(void);
MMPREC_API mmprec_status mmprec_solver_from_name(const char* name, mmprec_solver* out);
MMPREC_API const char* mmprec_solver_name(mmprec_solver solver);

/* ---- single design problem -------------------------------------------- */

/* M antennas, K users, downlink power p_dl (linear). Channels and error
 * covariances start at zero. */
MMPREC_API mmprec_status mmprec_problem_create(int num_antennas, int num_users, double p_dl,
                                               mmprec_problem** out);
MMPREC_API void mmprec_problem_destroy(mmprec_problem* problem);
/* h_hat: M x K complex. */
MMPREC_API mmprec_status mmprec_problem_set_estimates(mmprec_problem* problem,
                                                      const double* h_hat);
/* c_err: M x M complex Hermitian PSD for user k (0-based). */
MMPREC_API mmprec_status mmprec_problem_set_error_covariance(mmprec_problem* problem, int user,
                                                             const double* c_err);
/* Fills estimate and error covariance of every user from training:
 * covariances (K blocks of M x M complex), pilots (M x T complex),
 * observations (K blocks of length-T complex). */
MMPREC_API mmprec_status mmprec_problem_estimate(mmprec_problem* problem, int num_pilots,
                                                 const double* covariances,
                                                 const double* pilots,
                                                 const double* observations);

/* Robust lower-bound sum rate [bits per channel use] of an M x K precoder. */
MMPREC_API mmprec_status mmprec_problem_sum_rate_lb(const mmprec_problem* problem,
                                                    const double* precoder, double* out);

/* options may be NULL for defaults. */
MMPREC_API mmprec_status mmprec_solve(const mmprec_problem* problem, mmprec_solver solver,
                                      const mmprec_solver_options* options,
                                      mmprec_solution** out);
MMPREC_API void mmprec_solution_destroy(mmprec_solution* solution);
/* Copies the M x K precoder into out (2*M*K doubles). */
MMPREC_API mmprec_status mmprec_solution_precoder(const mmprec_solution* solution, double* out);
MMPREC_API double mmprec_solution_sum_rate_lb(const mmprec_solution* solution);
MMPREC_API int mmprec_solution_iterations(const mmprec_solution* solution);
MMPREC_API double mmprec_solution_wall_time(const mmprec_solution* solution);
MMPREC_API double mmprec_solution_final_beta(const mmprec_solution* solution);
MMPREC_API double mmprec_solution_final_delta(const mmprec_solution* solution);
/* Number of trace entries (initial value plus one per update). */
MMPREC_API size_t mmprec_solution_trace_length(const mmprec_solution* solution);
MMPREC_API mmprec_status mmprec_solution_trace(const mmprec_solution* solution, double* out,
                                               size_t capacity);

/* ---- experiment commands ---------------------------------------------- */

MMPREC_API mmprec_status mmprec_run_config_load(const char* path, mmprec_run_config** out);
MMPREC_API mmprec_status mmprec_run_config_parse(const char* text, mmprec_run_config** out);
MMPREC_API void mmprec_run_config_destroy(mmprec_run_config* config);
MMPREC_API mmprec_status mmprec_run_config_set_seed(mmprec_run_config* config, uint64_t seed);
MMPREC_API mmprec_status mmprec_run_config_set_threads(mmprec_run_config* config, int threads);
MMPREC_API const char* mmprec_run_config_output_dir(const mmprec_run_config* config);

/* Documented configuration keys, for help output. */
MMPREC_API size_t mmprec_config_key_count(void);
MMPREC_API mmprec_status mmprec_config_key(size_t index, const char** name,
                                           const char** default_value, const char** help);

/* Write sweep.csv + sweep_agg.csv, cdf_iterations.csv + cdf_runtime.csv,
 * or allocation.csv into out_dir (NULL: the config's output.dir). */
MMPREC_API mmprec_status mmprec_cmd_sweep(const mmprec_run_config* config, const char* out_dir);
MMPREC_API mmprec_status mmprec_cmd_convergence(const mmprec_run_config* config,
                                                const char* out_dir);
MMPREC_API mmprec_status mmprec_cmd_allocation(const mmprec_run_config* config,
                                               const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* MMPREC_H */
