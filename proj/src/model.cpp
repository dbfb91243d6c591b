// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#include "mmprec/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mmprec {

void SystemConfig::validate() const {
  if (num_antennas < 1) throw Error(ErrorKind::kConfig, "num_antennas must be >= 1");
  if (num_users < 1) throw Error(ErrorKind::kConfig, "num_users must be >= 1");
  if (num_pilots < 1 || num_pilots > num_antennas)
    throw Error(ErrorKind::kConfig,
                "num_pilots must satisfy 1 <= T_dl <= M (got " +
                    std::to_string(num_pilots) + ")");
  if (!(downlink_power > 0.0) || !std::isfinite(downlink_power))
    throw Error(ErrorKind::kConfig, "downlink_power must be positive");
}

CMatrix stack_estimates(const std::vector<ChannelEstimate>& estimates) {
  if (estimates.empty()) return CMatrix();
  CMatrix h(estimates.front().h_hat.size(), static_cast<Eigen::Index>(estimates.size()));
  for (std::size_t k = 0; k < estimates.size(); ++k) h.col(static_cast<Eigen::Index>(k)) = estimates[k].h_hat;
  return h;
}

CovarianceModel CovarianceModel::identity(int m) {
  CovarianceModel c;
  c.kind = Kind::kIdentity;
  c.dimension = m;
  return c;
}

CovarianceModel CovarianceModel::exponential(int m, double rho) {
  CovarianceModel c;
  c.kind = Kind::kExponential;
  c.dimension = m;
  c.rho = rho;
  return c;
}

CovarianceModel CovarianceModel::diag(RVector d) {
  CovarianceModel c;
  c.kind = Kind::kDiagonal;
  c.dimension = static_cast<int>(d.size());
  c.diagonal = std::move(d);
  return c;
}

CovarianceModel CovarianceModel::explicit_matrix(CMatrix m) {
  CovarianceModel c;
  c.kind = Kind::kExplicit;
  c.dimension = static_cast<int>(m.rows());
  c.matrix = std::move(m);
  return c;
}

bool is_hermitian_psd(const CMatrix& c) {
  if (c.rows() != c.cols()) return false;
  if (c.size() == 0) return true;
  const double scale = std::max(c.cwiseAbs().maxCoeff(), 1.0);
  if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c, Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  const double lmax = std::max(ev.maxCoeff(), 0.0);
  return ev.minCoeff() >= -1e-10 * lmax;
}

CMatrix generate_covariance(const CovarianceModel& model) {
  if (model.dimension < 1)
    throw Error(ErrorKind::kConfig, "covariance dimension must be >= 1");
  const int m = model.dimension;
  switch (model.kind) {
    case CovarianceModel::Kind::kIdentity:
      return CMatrix::Identity(m, m);
    case CovarianceModel::Kind::kExponential: {
      if (!(model.rho >= 0.0 && model.rho < 1.0))
        throw Error(ErrorKind::kConfig, "exponential correlation rho must lie in [0, 1)");
      CMatrix c(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) c(i, j) = std::pow(model.rho, std::abs(i - j));
      return c;
    }
    case CovarianceModel::Kind::kDiagonal: {
      if (model.diagonal.size() != m || (model.diagonal.array() <= 0.0).any())
        throw Error(ErrorKind::kConfig, "diagonal covariance needs M positive entries");
      return model.diagonal.cast<cdouble>().asDiagonal();
    }
    case CovarianceModel::Kind::kExplicit: {
      if (model.matrix.rows() != m || !is_hermitian_psd(model.matrix))
        throw Error(ErrorKind::kConfig, "explicit covariance is not Hermitian PSD");
      CMatrix c = 0.5 * (model.matrix + model.matrix.adjoint());
      return c;
    }
  }
  throw Error(ErrorKind::kDefect, "unknown covariance kind");
}

CMatrix psd_factor(const CMatrix& c) {
  if (c.rows() != c.cols()) throw Error(ErrorKind::kConfig, "covariance must be square");
  Eigen::LLT<CMatrix> llt(c);
  if (llt.info() == Eigen::Success) {
    CMatrix l = llt.matrixL();
    return l;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::kDefect, "eigendecomposition of covariance failed");
  const RVector& ev = es.eigenvalues();
  const double lmax = std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() < -1e-10 * lmax)
    throw Error(ErrorKind::kConfig, "covariance is indefinite");
  const RVector root = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.cast<cdouble>().asDiagonal();
}

CVector complex_normal(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = std::numbers::sqrt2 / 2.0;
  CVector w(n);
  for (int i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    w(i) = cdouble(re * s, im * s);
  }
  return w;
}

CVector sample_channel_factored(const CMatrix& factor, Rng& rng) {
  return factor * complex_normal(static_cast<int>(factor.cols()), rng);
}

CVector sample_channel(const CMatrix& c, Rng& rng) {
  return sample_channel_factored(psd_factor(c), rng);
}

CMatrix random_unitary(int m, Rng& rng) {
  CMatrix g(m, m);
  for (int j = 0; j < m; ++j) g.col(j) = complex_normal(m, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR();
  // Fix the phases of R's diagonal so Q is Haar distributed.
  for (int j = 0; j < m; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

namespace {

void normalize_columns(CMatrix& phi) {
  for (Eigen::Index j = 0; j < phi.cols(); ++j) {
    const double n = phi.col(j).norm();
    if (n == 0.0) throw Error(ErrorKind::kConfig, "pilot column has zero norm");
    phi.col(j) /= n;
  }
}

}  // namespace

PilotMatrix build_pilot_matrix(int m, int t_dl, PilotStrategy strategy,
                               const std::optional<CMatrix>& c_avg) {
  if (m < 1 || t_dl < 1 || t_dl > m)
    throw Error(ErrorKind::kConfig, "pilot count must satisfy 1 <= T_dl <= M");
  PilotMatrix out;
  out.strategy = strategy;
  switch (strategy) {
    case PilotStrategy::kDftTruncated: {
      out.phi.resize(m, t_dl);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      for (int i = 0; i < m; ++i)
        for (int t = 0; t < t_dl; ++t) {
          // Reduce the exponent modulo m before scaling to keep the phase exact.
          const long long e = (static_cast<long long>(i) * t) % m;
          const double angle = -2.0 * std::numbers::pi * static_cast<double>(e) / m;
          out.phi(i, t) = std::polar(scale, angle);
        }
      break;
    }
    case PilotStrategy::kCovarianceEigenvectors: {
      if (!c_avg) throw Error(ErrorKind::kConfig, "covariance_eigenvectors pilots need C_avg");
      if (c_avg->rows() != m || c_avg->cols() != m)
        throw Error(ErrorKind::kConfig, "C_avg has wrong dimension");
      Eigen::SelfAdjointEigenSolver<CMatrix> es(*c_avg);
      if (es.info() != Eigen::Success)
        throw Error(ErrorKind::kDefect, "eigendecomposition of C_avg failed");
      // Eigen sorts ascending; take the last t_dl columns in reverse.
      out.phi.resize(m, t_dl);
      for (int t = 0; t < t_dl; ++t) out.phi.col(t) = es.eigenvectors().col(m - 1 - t);
      break;
    }
    case PilotStrategy::kExplicit:
      throw Error(ErrorKind::kConfig, "use explicit_pilot_matrix() for caller-supplied pilots");
  }
  normalize_columns(out.phi);
  return out;
}

PilotMatrix explicit_pilot_matrix(CMatrix phi) {
  if (phi.cols() < 1 || phi.cols() > phi.rows())
    throw Error(ErrorKind::kConfig, "pilot count must satisfy 1 <= T_dl <= M");
  normalize_columns(phi);
  return PilotMatrix{std::move(phi), PilotStrategy::kExplicit};
}

CVector simulate_training(const CVector& h, const PilotMatrix& pilots,
                          double p_dl, Rng& rng) {
  if (h.size() != pilots.phi.rows())
    throw Error(ErrorKind::kConfig, "channel length does not match pilot matrix");
  if (!(p_dl > 0.0)) throw Error(ErrorKind::kConfig, "P_dl must be positive");
  const CVector noise = complex_normal(static_cast<int>(pilots.phi.cols()), rng) / std::sqrt(p_dl);
  return pilots.phi.adjoint() * h + noise;
}

}  // namespace mmprec
