// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#include "mmprec/estimation.hpp"

namespace mmprec {

namespace {

void check_dims(const CMatrix& c, const PilotMatrix& pilots, double p_dl) {
  if (c.rows() != c.cols() || c.rows() != pilots.phi.rows())
    throw Error(ErrorKind::kConfig, "covariance and pilot dimensions disagree");
  if (!(p_dl > 0.0)) throw Error(ErrorKind::kConfig, "P_dl must be positive");
}

// G = C Phi, and the factorization of Phi^H C Phi + I/P_dl.
struct InnerSystem {
  CMatrix c_phi;
  Eigen::LLT<CMatrix> llt;
};

InnerSystem factor_inner(const CMatrix& c, const PilotMatrix& pilots, double p_dl) {
  check_dims(c, pilots, p_dl);
  const auto t = pilots.phi.cols();
  InnerSystem sys;
  sys.c_phi = c * pilots.phi;
  CMatrix inner = pilots.phi.adjoint() * sys.c_phi;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  inner += CMatrix::Identity(t, t) / p_dl;
  sys.llt.compute(inner);
  if (sys.llt.info() != Eigen::Success)
    throw Error(ErrorKind::kDefect, "LMMSE inner system is not positive definite");
  return sys;
}

}  // namespace

CMatrix lmmse_filter(const CMatrix& c, const PilotMatrix& pilots, double p_dl) {
  InnerSystem sys = factor_inner(c, pilots, p_dl);
  // (C Phi) S^{-1} = (S^{-1} (C Phi)^H)^H since S is Hermitian.
  return sys.llt.solve(sys.c_phi.adjoint()).adjoint();
}

CVector lmmse_estimate(const CMatrix& c, const PilotMatrix& pilots, double p_dl,
                       const CVector& y) {
  if (y.size() != pilots.phi.cols())
    throw Error(ErrorKind::kConfig, "observation length must equal T_dl");
  InnerSystem sys = factor_inner(c, pilots, p_dl);
  return sys.c_phi * sys.llt.solve(y);
}

CMatrix error_covariance(const CMatrix& c, const PilotMatrix& pilots, double p_dl) {
  InnerSystem sys = factor_inner(c, pilots, p_dl);
  CMatrix err = c - sys.c_phi * sys.llt.solve(sys.c_phi.adjoint());
  return 0.5 * (err + err.adjoint());
}

LmmseEstimator::LmmseEstimator(const CMatrix& c, const PilotMatrix& pilots, double p_dl) {
  InnerSystem sys = factor_inner(c, pilots, p_dl);
  const CMatrix solved = sys.llt.solve(sys.c_phi.adjoint());
  filter_ = solved.adjoint();
  CMatrix err = c - sys.c_phi * solved;
  c_err_ = 0.5 * (err + err.adjoint());
}

ChannelEstimate LmmseEstimator::estimate(const CVector& y) const {
  if (y.size() != filter_.cols())
    throw Error(ErrorKind::kConfig, "observation length must equal T_dl");
  return ChannelEstimate{filter_ * y, c_err_};
}

}  // namespace mmprec
