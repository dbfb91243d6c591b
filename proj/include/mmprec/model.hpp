// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

// Channel statistics, channel sampling, pilot design and the noisy
// downlink-training observation y_k = Phi^H h_k + n_k.

#ifndef MMPREC_MODEL_HPP
#define MMPREC_MODEL_HPP

#include <optional>
#include <vector>

#include "mmprec/types.hpp"

namespace mmprec {

struct CovarianceModel {
  enum class Kind { kIdentity, kExponential, kDiagonal, kExplicit };

  Kind kind = Kind::kIdentity;
  int dimension = 1;
  double rho = 0.0;     // kExponential
  RVector diagonal;     // kDiagonal
  CMatrix matrix;       // kExplicit

  static CovarianceModel identity(int m);
  static CovarianceModel exponential(int m, double rho);
  static CovarianceModel diag(RVector d);
  static CovarianceModel explicit_matrix(CMatrix c);
};

/// Deterministic; C[i,j] = rho^|i-j| for the exponential model.
CMatrix generate_covariance(const CovarianceModel& model);

/// True when c is Hermitian within 1e-12 (entrywise, relative to its max
/// entry) and its smallest eigenvalue is >= -1e-10 * largest.
bool is_hermitian_psd(const CMatrix& c);

/// Factor L with C = L L^H. Cholesky when positive definite, otherwise the
/// eigenvalue-clipped square root.
CMatrix psd_factor(const CMatrix& c);

/// Circularly-symmetric unit-variance complex Gaussian vector.
CVector complex_normal(int n, Rng& rng);

/// h ~ CN(0, C).
CVector sample_channel(const CMatrix& c, Rng& rng);
/// Same, with a precomputed factor from psd_factor().
CVector sample_channel_factored(const CMatrix& factor, Rng& rng);

/// Haar-distributed M x M unitary.
CMatrix random_unitary(int m, Rng& rng);

enum class PilotStrategy { kDftTruncated, kCovarianceEigenvectors, kExplicit };

struct PilotMatrix {
  CMatrix phi;  // M x T_dl, unit-norm columns
  PilotStrategy strategy = PilotStrategy::kDftTruncated;
};

PilotMatrix build_pilot_matrix(int m, int t_dl, PilotStrategy strategy,
                               const std::optional<CMatrix>& c_avg = {});

/// Wraps a caller-supplied pilot matrix after normalizing its columns.
PilotMatrix explicit_pilot_matrix(CMatrix phi);

/// y = Phi^H h + n with n ~ CN(0, I / P_dl).
CVector simulate_training(const CVector& h, const PilotMatrix& pilots,
                          double p_dl, Rng& rng);

}  // namespace mmprec

#endif  // MMPREC_MODEL_HPP
