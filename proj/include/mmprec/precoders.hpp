// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

// Precoder solvers for the robust sum-rate lower bound:
//   zf        zero forcing on the estimated channels (also the MM starting point)
//   mm_lb     MM with the closed-form scaled multiplier delta = tr(A) / P_dl
//   mm_lb_inst  mm_lb designed as if the estimates were the true channels
//   mm_bisec  MM with the multiplier found by bisection in every update
//   mmplus    MM on a second, isotropic minorizer; projection-type update
//
// Every MM solver starts from ZF (matched filter when the estimate is rank
// deficient) and stops once the relative change of the lower bound drops
// below rel_tolerance.

#ifndef MMPREC_PRECODERS_HPP
#define MMPREC_PRECODERS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmprec/metrics.hpp"
#include "mmprec/types.hpp"

namespace mmprec {

enum class SolverId { kZf, kMmLb, kMmLbInst, kMmBisec, kMmPlus };

std::string_view solver_name(SolverId id);
/// Throws Error(kConfig) for unknown names.
SolverId parse_solver(std::string_view name);

struct SolverOptions {
  int max_iterations = 500;
  int max_iterations_mmplus = 2000;
  double rel_tolerance = 1e-6;
  double bisection_tolerance = 1e-8;
  int bisection_max_steps = 200;
  bool treat_estimate_as_truth = false;

  void validate() const;
};

struct SolverTrace {
  /// Entry 0 is the lower bound at the initial precoder; entry t >= 1 the
  /// value after the t-th update.
  std::vector<double> objective_per_iteration;
  int iterations_used = 0;
  double wall_time_seconds = 0.0;
  double final_beta = 1.0;
  double final_delta = 0.0;
};

struct SolverResult {
  Precoder precoder;
  SolverTrace trace;
};

/// beta * H (H^H H)^{-1}, beta chosen so that ||P||_F^2 = P_dl.
/// Throws Error(kDegenerate) when H_hat is rank deficient (or K > M).
Precoder zf_precoder(const CMatrix& h_hat, double p_dl);

/// Columns proportional to h_k, scaled to the power budget.
Precoder matched_filter_precoder(const CMatrix& h_hat, double p_dl);

/// ZF, falling back to the matched filter on a degenerate estimate.
Precoder initial_precoder(const CMatrix& h_hat, double p_dl);

/// Solves X W = rhs for Hermitian positive definite X via Cholesky; on
/// factorization failure retries once with 1e-12 * tr(X) / M diagonal jitter.
CMatrix hermitian_solve(const CMatrix& x, const CMatrix& rhs);

/// Z + H A H^H, the quadratic-form matrix of the surrogate.
CMatrix surrogate_quadratic(const MMCoefficients& coeffs, const CMatrix& h_hat);

/// H_hat B^*, column k equal to conj(b_k) h_k.
CMatrix surrogate_linear(const MMCoefficients& coeffs, const CMatrix& h_hat);

/// (Z + H A H^H + tr(A)/P_dl I)^{-1} H B^*. Throws Error(kStalled) when all
/// coefficients vanish.
Precoder mm_lb_update(const MMCoefficients& coeffs, const CMatrix& h_hat, double p_dl);

/// Power scaling that puts sqrt(beta) * unscaled on the budget.
double mm_beta(const Precoder& unscaled, double p_dl);
/// beta(delta) = P_dl / tr(X(delta)^{-2} H B^* B H^H), X(delta) = Z + H A H^H + delta I.
double mm_beta(const MMCoefficients& coeffs, const CMatrix& h_hat, double p_dl, double delta);

/// Surrogate objective (up to P-independent constants) along the family
/// P(delta) = sqrt(beta(delta)) X(delta)^{-1} H B^*. Its maximizer over
/// delta >= 0 is tr(A) / P_dl.
double delta_objective(const MMCoefficients& coeffs, const CMatrix& h_hat, double p_dl,
                       double delta);

SolverResult mm_lb_solve(const EstimatedChannels& est, double p_dl,
                         const SolverOptions& options = {});

struct BisectionStep {
  Precoder precoder;
  double lambda = 0.0;
  int steps = 0;
};

/// P(lambda) = (Z + H A H^H + lambda I)^{-1} H B^* with lambda >= 0 chosen so
/// the power budget holds (with equality when the constraint is active).
BisectionStep mm_bisec_update(const MMCoefficients& coeffs, const CMatrix& h_hat,
                              double p_dl, const SolverOptions& options = {});

SolverResult mm_bisec_solve(const EstimatedChannels& est, double p_dl,
                            const SolverOptions& options = {});

/// eta = sum_j a_j ||h_j||^2 + sum_j a_j ||C_err,j||_F, an upper bound on
/// lambda_max(sum_j a_j (h_j h_j^H + C_err,j)).
double mmplus_eta(const MMCoefficients& coeffs, const EstimatedChannels& est);

/// p_k = q_k * min(sqrt(P_dl / sum_j ||q_j||^2), 1) with
/// q_k = eta^{-1} (conj(b_k) h_k - (sum_j a_j (h_j h_j^H + C_err,j) - eta I) pbar_k).
Precoder mmplus_update(const MMCoefficients& coeffs, const EstimatedChannels& est,
                       const Precoder& p_bar, double p_dl);

SolverResult mmplus_solve(const EstimatedChannels& est, double p_dl,
                          const SolverOptions& options = {});

SolverResult zf_solve(const EstimatedChannels& est, double p_dl);

/// Runs the named solver. mm_lb_inst designs on est.as_perfect(); the
/// trace objective is then the design-side value.
SolverResult solve(SolverId id, const EstimatedChannels& est, double p_dl,
                   const SolverOptions& options = {});

}  // namespace mmprec

#endif  // MMPREC_PRECODERS_HPP
