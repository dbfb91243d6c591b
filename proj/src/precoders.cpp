// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#include "mmprec/precoders.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <string>

namespace mmprec {

namespace {

using Clock = std::chrono::steady_clock;

void check_power(double p_dl) {
  if (!(p_dl > 0.0) || !std::isfinite(p_dl))
    throw Error(ErrorKind::kConfig, "P_dl must be positive and finite");
}

Precoder scale_to_budget(Precoder p, double p_dl) {
  const double power = p.squaredNorm();
  if (!(power > 0.0)) throw Error(ErrorKind::kDegenerate, "cannot scale a zero precoder");
  p *= std::sqrt(p_dl / power);
  return p;
}

std::optional<Eigen::LLT<CMatrix>> try_factor(const CMatrix& x) {
  Eigen::LLT<CMatrix> llt(x);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return llt;
}

bool converged(double previous, double current, double tol) {
  return std::abs(current - previous) / std::max(current, 1e-12) < tol;
}

// Shared MM outer loop. `step` maps the current iterate and its coefficients
// to the next iterate and records the multiplier/scaling it used.
using StepFn = std::function<Precoder(const Precoder&, const MMCoefficients&, SolverTrace&)>;

SolverResult run_mm(const EstimatedChannels& est, double p_dl, int max_iterations,
                    double rel_tolerance, const StepFn& step) {
  est.validate();
  check_power(p_dl);
  const auto start = Clock::now();
  SolverResult out;
  out.precoder = initial_precoder(est.h_hat, p_dl);
  // The coefficients at an iterate also carry its lower-bound sum rate.
  MMCoefficients coeffs = mm_coefficients(est, out.precoder);
  double current = coeffs.sum_rate;
  out.trace.objective_per_iteration.push_back(current);
  for (int it = 0; it < max_iterations; ++it) {
    if (coeffs.dead())
      throw Error(ErrorKind::kStalled, "all MM coefficients vanished");
    out.precoder = step(out.precoder, coeffs, out.trace);
    coeffs = mm_coefficients(est, out.precoder);
    const double next = coeffs.sum_rate;
    out.trace.objective_per_iteration.push_back(next);
    out.trace.iterations_used = it + 1;
    const double previous = current;
    current = next;
    if (converged(previous, current, rel_tolerance)) break;
  }
  out.trace.wall_time_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

}  // namespace

std::string_view solver_name(SolverId id) {
  switch (id) {
    case SolverId::kZf: return "zf";
    case SolverId::kMmLb: return "mm_lb";
    case SolverId::kMmLbInst: return "mm_lb_inst";
    case SolverId::kMmBisec: return "mm_bisec";
    case SolverId::kMmPlus: return "mmplus";
  }
  return "unknown";
}

SolverId parse_solver(std::string_view name) {
  for (SolverId id : {SolverId::kZf, SolverId::kMmLb, SolverId::kMmLbInst,
                      SolverId::kMmBisec, SolverId::kMmPlus})
    if (solver_name(id) == name) return id;
  throw Error(ErrorKind::kConfig, "unknown solver '" + std::string(name) + "'");
}

void SolverOptions::validate() const {
  if (max_iterations < 1 || max_iterations_mmplus < 1)
    throw Error(ErrorKind::kConfig, "max_iterations must be >= 1");
  if (!(rel_tolerance > 0.0)) throw Error(ErrorKind::kConfig, "rel_tolerance must be > 0");
  if (!(bisection_tolerance > 0.0))
    throw Error(ErrorKind::kConfig, "bisection_tolerance must be > 0");
  if (bisection_max_steps < 1)
    throw Error(ErrorKind::kConfig, "bisection_max_steps must be >= 1");
}

Precoder zf_precoder(const CMatrix& h_hat, double p_dl) {
  check_power(p_dl);
  if (h_hat.cols() > h_hat.rows())
    throw Error(ErrorKind::kDegenerate, "zero forcing needs K <= M");
  // H (H^H H)^{-1} = U S^{-1} V^H for the thin SVD H = U S V^H.
  Eigen::JacobiSVD<CMatrix> svd(h_hat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || !(s(s.size() - 1) > 1e-10 * s(0)))
    throw Error(ErrorKind::kDegenerate, "estimated channel matrix is rank deficient");
  const Precoder p = svd.matrixU() * s.cwiseInverse().cast<cdouble>().asDiagonal() *
                     svd.matrixV().adjoint();
  return scale_to_budget(p, p_dl);
}

Precoder matched_filter_precoder(const CMatrix& h_hat, double p_dl) {
  check_power(p_dl);
  Precoder p = h_hat;
  for (Eigen::Index k = 0; k < p.cols(); ++k) {
    const double n = p.col(k).norm();
    if (n > 0.0) p.col(k) /= n;
  }
  return scale_to_budget(p, p_dl);
}

Precoder initial_precoder(const CMatrix& h_hat, double p_dl) {
  try {
    return zf_precoder(h_hat, p_dl);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerate) throw;
  }
  return matched_filter_precoder(h_hat, p_dl);
}

CMatrix hermitian_solve(const CMatrix& x, const CMatrix& rhs) {
  if (auto llt = try_factor(x)) return llt->solve(rhs);
  const Eigen::Index m = x.rows();
  const double jitter = 1e-12 * std::max(x.trace().real(), 1e-300) / static_cast<double>(m);
  CMatrix shifted = x;
  shifted.diagonal().array() += jitter;
  if (auto llt = try_factor(shifted)) return llt->solve(rhs);
  throw Error(ErrorKind::kDefect, "Hermitian system is not positive definite");
}

CMatrix surrogate_quadratic(const MMCoefficients& coeffs, const CMatrix& h_hat) {
  CMatrix y = coeffs.z + h_hat * coeffs.a.cast<cdouble>().asDiagonal() * h_hat.adjoint();
  return 0.5 * (y + y.adjoint());
}

CMatrix surrogate_linear(const MMCoefficients& coeffs, const CMatrix& h_hat) {
  return h_hat * coeffs.b.conjugate().asDiagonal();
}

Precoder mm_lb_update(const MMCoefficients& coeffs, const CMatrix& h_hat, double p_dl) {
  check_power(p_dl);
  if (coeffs.dead()) throw Error(ErrorKind::kStalled, "all MM coefficients vanished");
  const double delta = coeffs.a.sum() / p_dl;
  CMatrix x = surrogate_quadratic(coeffs, h_hat);
  x.diagonal().array() += delta;
  return hermitian_solve(x, surrogate_linear(coeffs, h_hat));
}

double mm_beta(const Precoder& unscaled, double p_dl) {
  check_power(p_dl);
  const double power = unscaled.squaredNorm();
  if (!(power > 0.0)) throw Error(ErrorKind::kStalled, "unscaled precoder is zero");
  return p_dl / power;
}

double mm_beta(const MMCoefficients& coeffs, const CMatrix& h_hat, double p_dl, double delta) {
  check_power(p_dl);
  if (coeffs.dead()) throw Error(ErrorKind::kStalled, "all MM coefficients vanished");
  CMatrix x = surrogate_quadratic(coeffs, h_hat);
  x.diagonal().array() += delta;
  // tr(X^-2 c c^H) = ||X^-1 c||_F^2
  const double denom = hermitian_solve(x, surrogate_linear(coeffs, h_hat)).squaredNorm();
  if (!(denom > 0.0)) throw Error(ErrorKind::kStalled, "B is zero");
  return p_dl / denom;
}

double delta_objective(const MMCoefficients& coeffs, const CMatrix& h_hat, double p_dl,
                       double delta) {
  check_power(p_dl);
  const CMatrix y = surrogate_quadratic(coeffs, h_hat);
  const CMatrix c = surrogate_linear(coeffs, h_hat);
  CMatrix x = y;
  x.diagonal().array() += delta;
  const CMatrix w = hermitian_solve(x, c);
  return 2.0 * (c.adjoint() * w).trace().real() - (w.adjoint() * y * w).trace().real() -
         coeffs.a.sum() / p_dl * w.squaredNorm();
}

SolverResult mm_lb_solve(const EstimatedChannels& est, double p_dl, const SolverOptions& options) {
  options.validate();
  const EstimatedChannels design = options.treat_estimate_as_truth ? est.as_perfect() : est;
  return run_mm(design, p_dl, options.max_iterations, options.rel_tolerance,
                [&](const Precoder&, const MMCoefficients& coeffs, SolverTrace& trace) {
                  const Precoder unscaled = mm_lb_update(coeffs, design.h_hat, p_dl);
                  trace.final_delta = coeffs.a.sum() / p_dl;
                  trace.final_beta = mm_beta(unscaled, p_dl);
                  return Precoder(std::sqrt(trace.final_beta) * unscaled);
                });
}

BisectionStep mm_bisec_update(const MMCoefficients& coeffs, const CMatrix& h_hat,
                              double p_dl, const SolverOptions& options) {
  check_power(p_dl);
  if (coeffs.dead()) throw Error(ErrorKind::kStalled, "all MM coefficients vanished");
  const CMatrix y = surrogate_quadratic(coeffs, h_hat);
  const CMatrix c = surrogate_linear(coeffs, h_hat);
  BisectionStep out;
  auto precoder_at = [&](double lambda) -> std::optional<Precoder> {
    CMatrix x = y;
    x.diagonal().array() += lambda;
    auto llt = try_factor(x);
    if (!llt) return std::nullopt;
    return Precoder(llt->solve(c));
  };

  // Inactive constraint: the unconstrained maximizer already fits the budget.
  if (auto p0 = precoder_at(0.0); p0 && p0->allFinite() && p0->squaredNorm() <= p_dl) {
    out.precoder = std::move(*p0);
    return out;
  }

  double lo = 0.0;
  double hi = coeffs.a.sum() / p_dl + coeffs.a.dot(h_hat.colwise().squaredNorm().transpose());
  if (!(hi > 0.0)) hi = 1.0;
  std::optional<Precoder> p_hi = precoder_at(hi);
  int doublings = 0;
  while (!p_hi || p_hi->squaredNorm() >= p_dl) {
    if (++doublings > options.bisection_max_steps)
      throw Error(ErrorKind::kDefect, "bisection could not bracket the multiplier");
    lo = hi;
    hi *= 2.0;
    p_hi = precoder_at(hi);
  }

  const double tol = options.bisection_tolerance * p_dl;
  for (int step = 0; step < options.bisection_max_steps; ++step) {
    out.steps = step + 1;
    if (p_dl - p_hi->squaredNorm() <= tol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    std::optional<Precoder> p_mid = precoder_at(mid);
    if (p_mid && p_mid->squaredNorm() <= p_dl) {
      hi = mid;
      p_hi = std::move(p_mid);
    } else {
      lo = mid;
    }
  }
  out.lambda = hi;
  out.precoder = std::move(*p_hi);
  return out;
}

SolverResult mm_bisec_solve(const EstimatedChannels& est, double p_dl,
                            const SolverOptions& options) {
  options.validate();
  const EstimatedChannels design = options.treat_estimate_as_truth ? est.as_perfect() : est;
  return run_mm(design, p_dl, options.max_iterations, options.rel_tolerance,
                [&](const Precoder&, const MMCoefficients& coeffs, SolverTrace& trace) {
                  BisectionStep s = mm_bisec_update(coeffs, design.h_hat, p_dl, options);
                  trace.final_delta = s.lambda;
                  trace.final_beta = 1.0;
                  return std::move(s.precoder);
                });
}

double mmplus_eta(const MMCoefficients& coeffs, const EstimatedChannels& est) {
  double eta = 0.0;
  for (int j = 0; j < est.num_users(); ++j) {
    const double a = coeffs.a(j);
    if (a == 0.0) continue;
    eta += a * est.h_hat.col(j).squaredNorm();
    eta += a * est.c_err[static_cast<std::size_t>(j)].norm();
  }
  return eta;
}

Precoder mmplus_update(const MMCoefficients& coeffs, const EstimatedChannels& est,
                       const Precoder& p_bar, double p_dl) {
  check_power(p_dl);
  const double eta = mmplus_eta(coeffs, est);
  if (!(eta > 0.0)) throw Error(ErrorKind::kStalled, "eta vanished");
  const CMatrix l = surrogate_quadratic(coeffs, est.h_hat);
  // q_k = eta^{-1} (conj(b_k) h_k - (L - eta I) pbar_k)
  Precoder q = (surrogate_linear(coeffs, est.h_hat) - l * p_bar) / eta + p_bar;
  const double power = q.squaredNorm();
  if (power > p_dl) q *= std::sqrt(p_dl / power);
  return q;
}

SolverResult mmplus_solve(const EstimatedChannels& est, double p_dl, const SolverOptions& options) {
  options.validate();
  const EstimatedChannels design = options.treat_estimate_as_truth ? est.as_perfect() : est;
  return run_mm(design, p_dl, options.max_iterations_mmplus, options.rel_tolerance,
                [&](const Precoder& p_bar, const MMCoefficients& coeffs, SolverTrace& trace) {
                  trace.final_beta = 1.0;
                  trace.final_delta = 0.0;
                  return mmplus_update(coeffs, design, p_bar, p_dl);
                });
}

SolverResult zf_solve(const EstimatedChannels& est, double p_dl) {
  est.validate();
  const auto start = Clock::now();
  SolverResult out;
  out.precoder = zf_precoder(est.h_hat, p_dl);
  out.trace.objective_per_iteration.push_back(sum_rate_lower_bound(est, out.precoder).sum_rate);
  out.trace.wall_time_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

SolverResult solve(SolverId id, const EstimatedChannels& est, double p_dl,
                   const SolverOptions& options) {
  switch (id) {
    case SolverId::kZf:
      return zf_solve(est, p_dl);
    case SolverId::kMmLb:
      return mm_lb_solve(est, p_dl, options);
    case SolverId::kMmLbInst: {
      SolverOptions inst = options;
      inst.treat_estimate_as_truth = true;
      return mm_lb_solve(est, p_dl, inst);
    }
    case SolverId::kMmBisec:
      return mm_bisec_solve(est, p_dl, options);
    case SolverId::kMmPlus:
      return mmplus_solve(est, p_dl, options);
  }
  throw Error(ErrorKind::kDefect, "unknown solver id");
}

}  // namespace mmprec
