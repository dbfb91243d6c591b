// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MMPREC_ESTIMATION_HPP
#define MMPREC_ESTIMATION_HPP

#include "mmprec/model.hpp"
#include "mmprec/types.hpp"

namespace mmprec {

/// LMMSE filter C Phi (Phi^H C Phi + I/P_dl)^{-1}, an M x T_dl matrix.
/// The inner system is solved through a Cholesky factorization.
CMatrix lmmse_filter(const CMatrix& c, const PilotMatrix& pilots, double p_dl);

/// h_hat = lmmse_filter(C, Phi, P_dl) * y.
CVector lmmse_estimate(const CMatrix& c, const PilotMatrix& pilots, double p_dl,
                       const CVector& y);

/// C_err = C - C Phi (Phi^H C Phi + I/P_dl)^{-1} Phi^H C, symmetrized.
CMatrix error_covariance(const CMatrix& c, const PilotMatrix& pilots, double p_dl);

/// Estimator for one user, caching the observation-independent parts.
class LmmseEstimator {
 public:
  LmmseEstimator(const CMatrix& c, const PilotMatrix& pilots, double p_dl);

  ChannelEstimate estimate(const CVector& y) const;
  const CMatrix& filter() const { return filter_; }
  const CMatrix& error_covariance() const { return c_err_; }

 private:
  CMatrix filter_;
  CMatrix c_err_;
};

}  // namespace mmprec

#endif  // MMPREC_ESTIMATION_HPP
