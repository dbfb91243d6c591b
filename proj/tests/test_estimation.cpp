// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mmprec/estimation.hpp"
#include "test_support.hpp"

using namespace mmprec;
using namespace mmprec::testing;

namespace {

PilotMatrix identity_pilots(int m) { return explicit_pilot_matrix(CMatrix::Identity(m, m)); }

// Monte Carlo training rounds for a fixed C, Phi, P_dl.
struct Samples {
  std::vector<CVector> h, y, h_hat;
};

Samples simulate(const CMatrix& c, const PilotMatrix& pilots, double p_dl, int n, Rng& rng) {
  const CMatrix f = psd_factor(c);
  const LmmseEstimator est(c, pilots, p_dl);
  Samples s;
  for (int i = 0; i < n; ++i) {
    CVector h = sample_channel_factored(f, rng);
    CVector y = simulate_training(h, pilots, p_dl, rng);
    s.h_hat.push_back(est.estimate(y).h_hat);
    s.h.push_back(std::move(h));
    s.y.push_back(std::move(y));
  }
  return s;
}

}  // namespace

TEST_CASE("all-identity case: filter 0.5 I, error 0.5 I") {
  const int m = 4;
  const CMatrix eye = CMatrix::Identity(m, m);
  const PilotMatrix pilots = identity_pilots(m);
  CHECK((lmmse_filter(eye, pilots, 1.0) - 0.5 * eye).norm() < 1e-14);
  CHECK((error_covariance(eye, pilots, 1.0) - 0.5 * eye).norm() < 1e-14);
  Rng rng(1);
  const CVector y = complex_normal(m, rng);
  CHECK((lmmse_estimate(eye, pilots, 1.0, y) - 0.5 * y).norm() < 1e-14);
}

TEST_CASE("zero prior gives the zero estimate") {
  Rng rng(2);
  const PilotMatrix pilots = build_pilot_matrix(5, 3, PilotStrategy::kDftTruncated);
  const CVector y = complex_normal(3, rng);
  CHECK(lmmse_estimate(CMatrix::Zero(5, 5), pilots, 10.0, y).norm() == 0.0);
  CHECK(error_covariance(CMatrix::Zero(5, 5), pilots, 10.0).norm() == 0.0);
}

TEST_CASE("noise-free limit drives the error covariance to zero") {
  Rng rng(3);
  for (int m : {2, 4, 8}) {
    const CMatrix c = random_psd(m, rng) + 0.1 * CMatrix::Identity(m, m);
    const CMatrix err = error_covariance(c, identity_pilots(m), 1e8);
    CHECK(err.norm() <= 1e-6 * c.norm());
  }
}

TEST_CASE("error covariance is Hermitian PSD and dominated by C") {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + trial % 7;
    const int t = 1 + trial % m;
    const CMatrix c = random_psd(m, rng, 1 + trial % m);
    const PilotMatrix pilots = build_pilot_matrix(m, t, PilotStrategy::kDftTruncated);
    const double p_dl = std::pow(10.0, (trial % 5) - 1.0);
    const CMatrix err = error_covariance(c, pilots, p_dl);
    CHECK((err - err.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(lambda_min(err) >= -1e-10 * std::max(lambda_max(c), 1.0));
    CHECK(lambda_min(c - err) >= -1e-10 * std::max(lambda_max(c), 1.0));
    // The estimator object agrees with the free functions.
    const LmmseEstimator est(c, pilots, p_dl);
    CHECK((est.error_covariance() - err).norm() <= 1e-12 * std::max(c.norm(), 1.0));
    CHECK((est.filter() - lmmse_filter(c, pilots, p_dl)).norm() <= 1e-12 * std::max(c.norm(), 1.0));
  }
}

TEST_CASE("more pilot power never increases the error") {
  Rng rng(5);
  const CMatrix c = random_psd(6, rng);
  const PilotMatrix pilots = build_pilot_matrix(6, 3, PilotStrategy::kDftTruncated);
  double prev = error_covariance(c, pilots, 0.1).trace().real();
  for (double p = 1.0; p <= 1e4; p *= 10.0) {
    const double cur = error_covariance(c, pilots, p).trace().real();
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("regression of h on y recovers the LMMSE filter") {
  Rng rng(6);
  const int m = 3;
  const int t = 2;
  const double p_dl = 2.0;
  const CMatrix c = random_psd(m, rng);
  const PilotMatrix pilots = build_pilot_matrix(m, t, PilotStrategy::kDftTruncated);
  const CMatrix f = psd_factor(c);
  const int n = 1000000;
  CMatrix ryy = CMatrix::Zero(t, t);
  CMatrix rhy = CMatrix::Zero(m, t);
  for (int i = 0; i < n; ++i) {
    const CVector h = sample_channel_factored(f, rng);
    const CVector y = simulate_training(h, pilots, p_dl, rng);
    ryy += y * y.adjoint();
    rhy += h * y.adjoint();
  }
  // Least squares: W = R_hy R_yy^{-1}.
  const CMatrix w = ryy.transpose().lu().solve(rhy.transpose()).transpose();
  const CMatrix expected = lmmse_filter(c, pilots, p_dl);
  CHECK((w - expected).norm() / expected.norm() < 0.02);
}

TEST_CASE("Monte Carlo error covariance and orthogonality") {
  Rng rng(7);
  const int m = 3;
  const double p_dl = 1.0;
  const CMatrix c = random_psd(m, rng);
  const PilotMatrix pilots = build_pilot_matrix(m, 2, PilotStrategy::kDftTruncated);
  const int n = 100000;
  const Samples s = simulate(c, pilots, p_dl, n, rng);
  CMatrix err_cov = CMatrix::Zero(m, m);
  CMatrix cross = CMatrix::Zero(m, m);
  for (int i = 0; i < n; ++i) {
    const CVector e = s.h[i] - s.h_hat[i];
    err_cov += e * e.adjoint();
    cross += s.h_hat[i] * e.adjoint();
  }
  err_cov /= n;
  cross /= n;
  const CMatrix analytic = error_covariance(c, pilots, p_dl);
  CHECK((err_cov - analytic).norm() / analytic.norm() < 0.05);
  CHECK(cross.norm() <= 0.05 * analytic.norm());
}

TEST_CASE("dimension and argument errors") {
  const PilotMatrix pilots = build_pilot_matrix(4, 2, PilotStrategy::kDftTruncated);
  CHECK_THROWS_AS(lmmse_filter(CMatrix::Identity(3, 3), pilots, 1.0), Error);
  CHECK_THROWS_AS(error_covariance(CMatrix::Identity(4, 4), pilots, 0.0), Error);
  CHECK_THROWS_AS(lmmse_estimate(CMatrix::Identity(4, 4), pilots, 1.0, CVector::Zero(3)), Error);
  const LmmseEstimator est(CMatrix::Identity(4, 4), pilots, 1.0);
  CHECK_THROWS_AS(est.estimate(CVector::Zero(4)), Error);
}
