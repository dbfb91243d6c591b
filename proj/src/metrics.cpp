// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#include "mmprec/metrics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mmprec {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

void check_precoder(const EstimatedChannels& est, const Precoder& p) {
  if (p.rows() != est.h_hat.rows() || p.cols() != est.h_hat.cols())
    throw Error(ErrorKind::kConfig, "precoder must be M x K");
}

// Per-user pieces of the lower-bound SINR at P.
struct UserTerms {
  CMatrix gains;      // G = H_hat^H P, G(k, j) = h_k^H p_j
  RVector err_power;  // sum_j p_j^H C_k p_j
};

UserTerms user_terms(const EstimatedChannels& est, const Precoder& p) {
  UserTerms t;
  t.gains = est.h_hat.adjoint() * p;
  const int k_users = est.num_users();
  t.err_power.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const CMatrix& c = est.c_err[static_cast<std::size_t>(k)];
    t.err_power(k) = std::max((c * p).cwiseProduct(p.conjugate()).sum().real(), 0.0);
  }
  return t;
}

// Interference + error + noise seen by user k (the denominator of gamma_bar_k).
double denominator(const UserTerms& t, int k) {
  return t.gains.row(k).squaredNorm() - std::norm(t.gains(k, k)) + t.err_power(k) + 1.0;
}

}  // namespace

EstimatedChannels EstimatedChannels::from(const std::vector<ChannelEstimate>& estimates) {
  EstimatedChannels est;
  est.h_hat = stack_estimates(estimates);
  est.c_err.reserve(estimates.size());
  for (const auto& e : estimates) est.c_err.push_back(e.c_err);
  return est;
}

EstimatedChannels EstimatedChannels::as_perfect() const {
  EstimatedChannels est;
  est.h_hat = h_hat;
  est.c_err.assign(c_err.size(), CMatrix::Zero(h_hat.rows(), h_hat.rows()));
  return est;
}

void EstimatedChannels::validate() const {
  if (h_hat.rows() < 1 || h_hat.cols() < 1)
    throw Error(ErrorKind::kConfig, "estimated channel matrix is empty");
  if (static_cast<Eigen::Index>(c_err.size()) != h_hat.cols())
    throw Error(ErrorKind::kConfig, "need one error covariance per user");
  for (const auto& c : c_err)
    if (c.rows() != h_hat.rows() || c.cols() != h_hat.rows())
      throw Error(ErrorKind::kConfig, "error covariance must be M x M");
}

double sinr_lower_bound(const EstimatedChannels& est, const Precoder& p, int k) {
  check_precoder(est, p);
  if (k < 0 || k >= est.num_users())
    throw Error(ErrorKind::kConfig, "user index out of range: " + std::to_string(k));
  const UserTerms t = user_terms(est, p);
  return std::norm(t.gains(k, k)) / denominator(t, k);
}

RateReport sum_rate_lower_bound(const EstimatedChannels& est, const Precoder& p) {
  check_precoder(est, p);
  const UserTerms t = user_terms(est, p);
  const int k_users = est.num_users();
  RateReport r;
  r.sinr.resize(k_users);
  r.rate.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    r.sinr(k) = std::norm(t.gains(k, k)) / denominator(t, k);
    r.rate(k) = std::log2(1.0 + r.sinr(k));
    r.sum_rate += r.rate(k);
  }
  return r;
}

double perfect_csi_sum_rate(const CMatrix& h, const Precoder& p) {
  if (h.rows() != p.rows() || h.cols() != p.cols())
    throw Error(ErrorKind::kConfig, "channel and precoder shapes differ");
  const CMatrix g = h.adjoint() * p;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < g.rows(); ++k) {
    const double signal = std::norm(g(k, k));
    const double interference = g.row(k).squaredNorm() - signal;
    sum += std::log2(1.0 + signal / (interference + 1.0));
  }
  return sum;
}

double log_rate_minorant(cdouble x, double z, cdouble x_bar, double z_bar) {
  if (!(z > 0.0) || !(z_bar > 0.0))
    throw Error(ErrorKind::kConfig, "z and z_bar must be positive");
  const double xb2 = std::norm(x_bar);
  const double g = xb2 / z_bar;
  const double linear = -g + 2.0 * (std::conj(x_bar) / z_bar * x).real() -
                        xb2 / (z_bar * (z_bar + xb2)) * (z + std::norm(x));
  return std::log2(1.0 + g) + kInvLn2 * linear;
}

MMCoefficients mm_coefficients(const EstimatedChannels& est, const Precoder& p_bar) {
  est.validate();
  check_precoder(est, p_bar);
  const UserTerms t = user_terms(est, p_bar);
  const int m = est.num_antennas();
  const int k_users = est.num_users();
  MMCoefficients c;
  c.a = RVector::Zero(k_users);
  c.b = CVector::Zero(k_users);
  c.sinr = RVector::Zero(k_users);
  c.z = CMatrix::Zero(m, m);
  for (int k = 0; k < k_users; ++k) {
    const cdouble x_bar = t.gains(k, k);
    const double z_bar = denominator(t, k);
    const double gamma = std::norm(x_bar) / z_bar;
    c.sinr(k) = gamma;
    c.sum_rate += std::log2(1.0 + gamma);
    if (x_bar == cdouble(0.0)) continue;
    c.a(k) = gamma / (z_bar + std::norm(x_bar));
    c.b(k) = std::conj(x_bar) / z_bar;
    c.z += c.a(k) * est.c_err[static_cast<std::size_t>(k)];
  }
  c.z = 0.5 * (c.z + c.z.adjoint()).eval();
  return c;
}

double surrogate_value(const Precoder& p, const MMCoefficients& coeffs,
                       const EstimatedChannels& est, double beta) {
  check_precoder(est, p);
  if (!(beta > 0.0)) throw Error(ErrorKind::kConfig, "beta must be positive");
  const UserTerms t = user_terms(est, p);
  const double inv_sqrt_beta = 1.0 / std::sqrt(beta);
  double linear = 0.0;
  for (int k = 0; k < est.num_users(); ++k) {
    const double quad = t.gains.row(k).squaredNorm() + t.err_power(k) + 1.0;
    linear += -coeffs.sinr(k) + 2.0 * inv_sqrt_beta * (coeffs.b(k) * t.gains(k, k)).real() -
              coeffs.a(k) / beta * quad;
  }
  return coeffs.sum_rate + kInvLn2 * linear;
}

double surrogate_value(const Precoder& p, const Precoder& p_bar,
                       const EstimatedChannels& est, double beta) {
  return surrogate_value(p, mm_coefficients(est, p_bar), est, beta);
}

}  // namespace mmprec
