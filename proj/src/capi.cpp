// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#include "mmprec/mmprec.h"

#include <algorithm>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "mmprec/cli.hpp"
#include "mmprec/estimation.hpp"
#include "mmprec/precoders.hpp"

struct mmprec_run_config {
  mmprec::RunConfig config;
};

struct mmprec_problem {
  mmprec::EstimatedChannels est;
  double p_dl = 1.0;
};

struct mmprec_solution {
  mmprec::SolverResult result;
  double sum_rate_lb = 0.0;
};

namespace {

thread_local std::string g_message;

mmprec_status status_of(mmprec::ErrorKind kind) {
  switch (kind) {
    case mmprec::ErrorKind::kConfig: return MMPREC_ERR_CONFIG;
    case mmprec::ErrorKind::kIo: return MMPREC_ERR_IO;
    case mmprec::ErrorKind::kDefect: return MMPREC_ERR_INTERNAL;
    case mmprec::ErrorKind::kDegenerate: return MMPREC_ERR_DEGENERATE;
    case mmprec::ErrorKind::kStalled: return MMPREC_ERR_STALLED;
  }
  return MMPREC_ERR_INTERNAL;
}

mmprec_status argument_error(const char* what) {
  g_message = what;
  return MMPREC_ERR_ARGUMENT;
}

template <typename F>
mmprec_status guarded(F&& body) {
  try {
    body();
    return MMPREC_OK;
  } catch (const mmprec::Error& e) {
    g_message = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_message = "out of memory";
    return MMPREC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_message = e.what();
    return MMPREC_ERR_INTERNAL;
  } catch (...) {
    g_message = "unknown error";
    return MMPREC_ERR_INTERNAL;
  }
}

mmprec::CMatrix read_matrix(const double* data, int rows, int cols) {
  const auto* c = reinterpret_cast<const mmprec::cdouble*>(data);
  return Eigen::Map<const mmprec::CMatrix>(c, rows, cols);
}

void write_matrix(const mmprec::CMatrix& m, double* out) {
  auto* c = reinterpret_cast<mmprec::cdouble*>(out);
  Eigen::Map<mmprec::CMatrix>(c, m.rows(), m.cols()) = m;
}

mmprec::SolverOptions to_options(const mmprec_solver_options& o) {
  mmprec::SolverOptions s;
  s.max_iterations = o.max_iterations;
  s.max_iterations_mmplus = o.max_iterations_mmplus;
  s.rel_tolerance = o.rel_tolerance;
  s.bisection_tolerance = o.bisection_tolerance;
  s.bisection_max_steps = o.bisection_max_steps;
  s.treat_estimate_as_truth = o.treat_estimate_as_truth != 0;
  return s;
}

bool valid_solver(mmprec_solver s) {
  return s >= MMPREC_SOLVER_ZF && s <= MMPREC_SOLVER_MMPLUS;
}

template <typename Cmd>
mmprec_status run_command(const mmprec_run_config* config, const char* out_dir, Cmd cmd) {
  if (!config) return argument_error("config is NULL");
  std::string summary;
  const mmprec_status st = guarded([&] {
    summary = cmd(config->config, out_dir ? std::string(out_dir) : config->config.output_dir);
  });
  if (st == MMPREC_OK) g_message = summary;
  return st;
}

}  // namespace

extern "C" {

const char* mmprec_version(void) { return "1.0.0"; }

const char* mmprec_last_message(void) { return g_message.c_str(); }

const char* mmprec_status_string(mmprec_status status) {
  switch (status) {
    case MMPREC_OK: return "ok";
    case MMPREC_ERR_CONFIG: return "configuration error";
    case MMPREC_ERR_IO: return "I/O error";
    case MMPREC_ERR_INTERNAL: return "internal error";
    case MMPREC_ERR_DEGENERATE: return "degenerate channel estimate";
    case MMPREC_ERR_STALLED: return "solver stalled";
    case MMPREC_ERR_ARGUMENT: return "invalid argument";
  }
  return "unknown status";
}

mmprec_solver_options mmprec_solver_options_default(void) {
  const mmprec::SolverOptions d;
  mmprec_solver_options o;
  o.max_iterations = d.max_iterations;
  o.max_iterations_mmplus = d.max_iterations_mmplus;
  o.rel_tolerance = d.rel_tolerance;
  o.bisection_tolerance = d.bisection_tolerance;
  o.bisection_max_steps = d.bisection_max_steps;
  o.treat_estimate_as_truth = d.treat_estimate_as_truth ? 1 : 0;
  return o;
}

mmprec_status mmprec_solver_from_name(const char* name, mmprec_solver* out) {
  if (!name || !out) return argument_error("NULL argument");
  return guarded([&] { *out = static_cast<mmprec_solver>(mmprec::parse_solver(name)); });
}

const char* mmprec_solver_name(mmprec_solver solver) {
  if (!valid_solver(solver)) return "unknown";
  return mmprec::solver_name(static_cast<mmprec::SolverId>(solver)).data();
}

mmprec_status mmprec_problem_create(int num_antennas, int num_users, double p_dl,
                                    mmprec_problem** out) {
  if (!out) return argument_error("out is NULL");
  *out = nullptr;
  if (num_antennas < 1 || num_users < 1) return argument_error("M and K must be >= 1");
  if (!(p_dl > 0.0)) return argument_error("P_dl must be positive");
  return guarded([&] {
    auto p = std::make_unique<mmprec_problem>();
    p->p_dl = p_dl;
    p->est.h_hat = mmprec::CMatrix::Zero(num_antennas, num_users);
    p->est.c_err.assign(static_cast<std::size_t>(num_users),
                        mmprec::CMatrix::Zero(num_antennas, num_antennas));
    *out = p.release();
  });
}

void mmprec_problem_destroy(mmprec_problem* problem) { delete problem; }

mmprec_status mmprec_problem_set_estimates(mmprec_problem* problem, const double* h_hat) {
  if (!problem || !h_hat) return argument_error("NULL argument");
  return guarded([&] {
    problem->est.h_hat = read_matrix(h_hat, problem->est.num_antennas(), problem->est.num_users());
  });
}

mmprec_status mmprec_problem_set_error_covariance(mmprec_problem* problem, int user,
                                                  const double* c_err) {
  if (!problem || !c_err) return argument_error("NULL argument");
  if (user < 0 || user >= problem->est.num_users()) return argument_error("user index out of range");
  return guarded([&] {
    const int m = problem->est.num_antennas();
    mmprec::CMatrix c = read_matrix(c_err, m, m);
    if (!mmprec::is_hermitian_psd(c))
      throw mmprec::Error(mmprec::ErrorKind::kConfig, "error covariance is not Hermitian PSD");
    problem->est.c_err[static_cast<std::size_t>(user)] = 0.5 * (c + c.adjoint());
  });
}

mmprec_status mmprec_problem_estimate(mmprec_problem* problem, int num_pilots,
                                      const double* covariances, const double* pilots,
                                      const double* observations) {
  if (!problem || !covariances || !pilots || !observations) return argument_error("NULL argument");
  const int m = problem->est.num_antennas();
  const int k_users = problem->est.num_users();
  if (num_pilots < 1 || num_pilots > m) return argument_error("num_pilots must be in 1..M");
  return guarded([&] {
    const mmprec::PilotMatrix phi = mmprec::explicit_pilot_matrix(read_matrix(pilots, m, num_pilots));
    mmprec::EstimatedChannels est = problem->est;
    for (int k = 0; k < k_users; ++k) {
      const mmprec::CMatrix c =
          read_matrix(covariances + static_cast<std::ptrdiff_t>(2) * m * m * k, m, m);
      if (!mmprec::is_hermitian_psd(c))
        throw mmprec::Error(mmprec::ErrorKind::kConfig, "covariance is not Hermitian PSD");
      const mmprec::CVector y =
          read_matrix(observations + static_cast<std::ptrdiff_t>(2) * num_pilots * k, num_pilots, 1);
      const mmprec::LmmseEstimator estimator(c, phi, problem->p_dl);
      const mmprec::ChannelEstimate e = estimator.estimate(y);
      est.h_hat.col(k) = e.h_hat;
      est.c_err[static_cast<std::size_t>(k)] = e.c_err;
    }
    problem->est = std::move(est);
  });
}

mmprec_status mmprec_problem_sum_rate_lb(const mmprec_problem* problem, const double* precoder,
                                         double* out) {
  if (!problem || !precoder || !out) return argument_error("NULL argument");
  return guarded([&] {
    const mmprec::Precoder p =
        read_matrix(precoder, problem->est.num_antennas(), problem->est.num_users());
    *out = mmprec::sum_rate_lower_bound(problem->est, p).sum_rate;
  });
}

mmprec_status mmprec_solve(const mmprec_problem* problem, mmprec_solver solver,
                           const mmprec_solver_options* options, mmprec_solution** out) {
  if (!problem || !out) return argument_error("NULL argument");
  *out = nullptr;
  if (!valid_solver(solver)) return argument_error("unknown solver");
  return guarded([&] {
    const mmprec::SolverOptions opts =
        options ? to_options(*options) : mmprec::SolverOptions{};
    auto s = std::make_unique<mmprec_solution>();
    s->result = mmprec::solve(static_cast<mmprec::SolverId>(solver), problem->est, problem->p_dl, opts);
    s->sum_rate_lb = mmprec::sum_rate_lower_bound(problem->est, s->result.precoder).sum_rate;
    *out = s.release();
  });
}

void mmprec_solution_destroy(mmprec_solution* solution) { delete solution; }

mmprec_status mmprec_solution_precoder(const mmprec_solution* solution, double* out) {
  if (!solution || !out) return argument_error("NULL argument");
  write_matrix(solution->result.precoder, out);
  return MMPREC_OK;
}

double mmprec_solution_sum_rate_lb(const mmprec_solution* solution) {
  return solution ? solution->sum_rate_lb : 0.0;
}

int mmprec_solution_iterations(const mmprec_solution* solution) {
  return solution ? solution->result.trace.iterations_used : 0;
}

double mmprec_solution_wall_time(const mmprec_solution* solution) {
  return solution ? solution->result.trace.wall_time_seconds : 0.0;
}

double mmprec_solution_final_beta(const mmprec_solution* solution) {
  return solution ? solution->result.trace.final_beta : 0.0;
}

double mmprec_solution_final_delta(const mmprec_solution* solution) {
  return solution ? solution->result.trace.final_delta : 0.0;
}

size_t mmprec_solution_trace_length(const mmprec_solution* solution) {
  return solution ? solution->result.trace.objective_per_iteration.size() : 0;
}

mmprec_status mmprec_solution_trace(const mmprec_solution* solution, double* out,
                                    size_t capacity) {
  if (!solution || !out) return argument_error("NULL argument");
  const auto& t = solution->result.trace.objective_per_iteration;
  if (capacity < t.size()) return argument_error("trace buffer too small");
  std::copy(t.begin(), t.end(), out);
  return MMPREC_OK;
}

mmprec_status mmprec_run_config_load(const char* path, mmprec_run_config** out) {
  if (!path || !out) return argument_error("NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<mmprec_run_config>();
    c->config = mmprec::load_run_config(path);
    *out = c.release();
  });
}

mmprec_status mmprec_run_config_parse(const char* text, mmprec_run_config** out) {
  if (!text || !out) return argument_error("NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<mmprec_run_config>();
    c->config = mmprec::parse_run_config(text);
    *out = c.release();
  });
}

void mmprec_run_config_destroy(mmprec_run_config* config) { delete config; }

mmprec_status mmprec_run_config_set_seed(mmprec_run_config* config, uint64_t seed) {
  if (!config) return argument_error("config is NULL");
  config->config.sweep.config.rng_seed = seed;
  return MMPREC_OK;
}

mmprec_status mmprec_run_config_set_threads(mmprec_run_config* config, int threads) {
  if (!config) return argument_error("config is NULL");
  if (threads < 0) return argument_error("threads must be >= 0");
  config->config.sweep.threads = threads;
  return MMPREC_OK;
}

const char* mmprec_run_config_output_dir(const mmprec_run_config* config) {
  return config ? config->config.output_dir.c_str() : "";
}

size_t mmprec_config_key_count(void) { return mmprec::config_keys().size(); }

mmprec_status mmprec_config_key(size_t index, const char** name, const char** default_value,
                                const char** help) {
  const auto& keys = mmprec::config_keys();
  if (index >= keys.size()) return argument_error("key index out of range");
  // The views point at string literals, so they are NUL terminated.
  if (name) *name = keys[index].name.data();
  if (default_value) *default_value = keys[index].default_value.data();
  if (help) *help = keys[index].help.data();
  return MMPREC_OK;
}

mmprec_status mmprec_cmd_sweep(const mmprec_run_config* config, const char* out_dir) {
  return run_command(config, out_dir, mmprec::cmd_sweep);
}

mmprec_status mmprec_cmd_convergence(const mmprec_run_config* config, const char* out_dir) {
  return run_command(config, out_dir, mmprec::cmd_convergence);
}

mmprec_status mmprec_cmd_allocation(const mmprec_run_config* config, const char* out_dir) {
  return run_command(config, out_dir, mmprec::cmd_allocation);
}

}  // extern "C"
