// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

// Robust SINR / sum-rate lower bounds under imperfect CSI, the perfect-CSI
// sum rate, and the minorizer built from the log(1 + |x|^2 / z) bound.
//
// All rates are in bits per channel use. The minorizer is the natural-log
// tangent bound rescaled by 1/ln 2, which keeps it a global lower bound of
// log2(1 + |x|^2 / z) with equality at the expansion point.

#ifndef MMPREC_METRICS_HPP
#define MMPREC_METRICS_HPP

#include <vector>

#include "mmprec/types.hpp"

namespace mmprec {

/// Estimated channel matrix (M x K) plus one error covariance per user.
struct EstimatedChannels {
  CMatrix h_hat;
  std::vector<CMatrix> c_err;

  static EstimatedChannels from(const std::vector<ChannelEstimate>& estimates);
  /// Same channels with every error covariance replaced by zero.
  EstimatedChannels as_perfect() const;

  int num_antennas() const { return static_cast<int>(h_hat.rows()); }
  int num_users() const { return static_cast<int>(h_hat.cols()); }
  void validate() const;
};

struct RateReport {
  RVector sinr;   // lower-bound SINR per user
  RVector rate;   // log2(1 + sinr)
  double sum_rate = 0.0;
};

/// gamma_bar_k = |h_k^H p_k|^2 / (sum_{j!=k} |h_k^H p_j|^2 + sum_j p_j^H C_k p_j + 1).
double sinr_lower_bound(const EstimatedChannels& est, const Precoder& p, int k);

RateReport sum_rate_lower_bound(const EstimatedChannels& est, const Precoder& p);

/// Sum rate on the true channels (columns of h) with no error term.
double perfect_csi_sum_rate(const CMatrix& h, const Precoder& p);

/// Right-hand side of the tangent lower bound of log2(1 + |x|^2 / z) at
/// (x_bar, z_bar). Throws Error(kConfig) unless z > 0 and z_bar > 0.
double log_rate_minorant(cdouble x, double z, cdouble x_bar, double z_bar);

/// Diagonal MM weights and aggregated error matrix at an iterate P_bar.
///   a_k = gamma_bar_k / (sum_j |h_k^H pbar_j|^2 + sum_j pbar_j^H C_k pbar_j + 1)
///   b_k = gamma_bar_k / (h_k^H pbar_k)   (= conj(h_k^H pbar_k) / z_bar_k)
///   Z   = sum_k a_k C_k
/// A user with h_k^H pbar_k = 0 gets a_k = b_k = 0.
struct MMCoefficients {
  RVector a;
  CVector b;
  CMatrix z;
  RVector sinr;        // gamma_bar_k(P_bar)
  double sum_rate = 0; // lower-bound sum rate at P_bar

  bool dead() const { return (a.array() == 0.0).all(); }
};

MMCoefficients mm_coefficients(const EstimatedChannels& est, const Precoder& p_bar);

/// Sum of per-user minorizers f_k(P, P_bar, beta) in bits.
double surrogate_value(const Precoder& p, const MMCoefficients& coeffs,
                       const EstimatedChannels& est, double beta = 1.0);
double surrogate_value(const Precoder& p, const Precoder& p_bar,
                       const EstimatedChannels& est, double beta = 1.0);

}  // namespace mmprec

#endif  // MMPREC_METRICS_HPP
