// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mmprec/metrics.hpp"
#include "test_support.hpp"

using namespace mmprec;
using namespace mmprec::testing;

namespace {

// Two orthogonal users with isotropic error 0.1 I.
EstimatedChannels two_user_example() {
  EstimatedChannels est;
  est.h_hat = CMatrix::Identity(2, 2);
  est.c_err = {0.1 * CMatrix::Identity(2, 2), 0.1 * CMatrix::Identity(2, 2)};
  return est;
}

EstimatedChannels single_user(const CVector& h, const CMatrix& c_err) {
  EstimatedChannels est;
  est.h_hat = h;
  est.c_err = {c_err};
  return est;
}

cdouble random_complex(Rng& rng, double max_abs) {
  std::uniform_real_distribution<double> r(0.0, max_abs);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  return std::polar(r(rng), phase(rng));
}

}  // namespace

TEST_CASE("SINR lower bound examples") {
  const EstimatedChannels est = two_user_example();
  CHECK(sinr_lower_bound(est, CMatrix::Zero(2, 2), 0) == 0.0);
  const CMatrix p = CMatrix::Identity(2, 2);
  // 1 / (0 interference + 0.1 + 0.1 error + 1 noise).
  CHECK(sinr_lower_bound(est, p, 0) == doctest::Approx(1.0 / 1.2).epsilon(1e-14));
  CHECK(sinr_lower_bound(est, p, 1) == doctest::Approx(1.0 / 1.2).epsilon(1e-14));

  Rng rng(1);
  const CVector h = complex_normal(4, rng);
  const double p_dl = 3.0;
  const EstimatedChannels one = single_user(h, CMatrix::Zero(4, 4));
  const CMatrix mf = std::sqrt(p_dl) * h / h.norm();
  CHECK(sinr_lower_bound(one, mf, 0) == doctest::Approx(p_dl * h.squaredNorm()).epsilon(1e-13));
}

TEST_CASE("sum rate lower bound examples") {
  const EstimatedChannels est = two_user_example();
  CHECK(sum_rate_lower_bound(est, CMatrix::Zero(2, 2)).sum_rate == 0.0);
  const RateReport r = sum_rate_lower_bound(est, CMatrix::Identity(2, 2));
  // 2 log2(1 + 1/1.2) = 2 log2(11/6).
  CHECK(r.sum_rate == doctest::Approx(2.0 * std::log2(11.0 / 6.0)).epsilon(1e-14));
  CHECK(r.sum_rate == doctest::Approx(1.748938).epsilon(1e-6));
  CHECK(r.rate.size() == 2);

  // One user with SINR exactly 1 gives 1 bit.
  CVector h(1);
  h << 1.0;
  CMatrix p(1, 1);
  p << 1.0;
  CHECK(sum_rate_lower_bound(single_user(h, CMatrix::Zero(1, 1)), p).sum_rate == doctest::Approx(1.0));
}

TEST_CASE("vectorized rate agrees with the scalar oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 8;
    const int k = 1 + trial % 5;
    const EstimatedChannels est = random_estimates(m, k, rng);
    const Precoder p = random_precoder(m, k, 1.0 + trial, rng);
    const RateReport r = sum_rate_lower_bound(est, p);
    for (int u = 0; u < k; ++u)
      CHECK(r.sinr(u) == doctest::Approx(scalar_sinr(est, p, u)).epsilon(1e-12));
    CHECK(r.sum_rate == doctest::Approx(scalar_sum_rate(est, p)).epsilon(1e-12));
  }
}

TEST_CASE("SINR invariant to per-column unit-phase rotation") {
  Rng rng(3);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 50; ++trial) {
    const EstimatedChannels est = random_estimates(4, 3, rng);
    Precoder p = random_precoder(4, 3, 5.0, rng);
    const RateReport before = sum_rate_lower_bound(est, p);
    for (int j = 0; j < 3; ++j) p.col(j) *= std::polar(1.0, phase(rng));
    const RateReport after = sum_rate_lower_bound(est, p);
    CHECK((before.sinr - after.sinr).cwiseAbs().maxCoeff() <= 1e-12 * before.sinr.maxCoeff());
  }
}

TEST_CASE("error covariance only lowers the bound") {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const EstimatedChannels est = random_estimates(5, 3, rng);
    const Precoder p = random_precoder(5, 3, 10.0, rng);
    CHECK(sum_rate_lower_bound(est, p).sum_rate <=
          sum_rate_lower_bound(est.as_perfect(), p).sum_rate + 1e-12);
  }
}

TEST_CASE("perfect-CSI sum rate examples") {
  CHECK(perfect_csi_sum_rate(CMatrix::Identity(2, 2), CMatrix::Zero(2, 2)) == 0.0);
  const double p_dl = 2.0;
  const CMatrix p = std::sqrt(p_dl / 2.0) * CMatrix::Identity(2, 2);
  CHECK(perfect_csi_sum_rate(CMatrix::Identity(2, 2), p) == doctest::Approx(2.0).epsilon(1e-14));

  Rng rng(5);
  const CVector h = complex_normal(6, rng);
  const CMatrix mf = std::sqrt(p_dl) * h / h.norm();
  CHECK(perfect_csi_sum_rate(h, mf) ==
        doctest::Approx(std::log2(1.0 + p_dl * h.squaredNorm())).epsilon(1e-13));

  // Matches the lower bound with zero error covariance.
  const EstimatedChannels est = random_estimates(4, 3, rng).as_perfect();
  const Precoder q = random_precoder(4, 3, 4.0, rng);
  CHECK(perfect_csi_sum_rate(est.h_hat, q) ==
        doctest::Approx(sum_rate_lower_bound(est, q).sum_rate).epsilon(1e-13));
}

TEST_CASE("lower-bound inequality: equality case and x_bar = 0") {
  CHECK(log_rate_minorant(1.0, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  Rng rng(6);
  std::uniform_real_distribution<double> zdist(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const cdouble x = random_complex(rng, 10.0);
    const double z = zdist(rng);
    CHECK(log_rate_minorant(x, z, 0.0, zdist(rng)) == 0.0);
    const double lhs = std::log2(1.0 + std::norm(x) / z);
    CHECK(std::abs(log_rate_minorant(x, z, x, z) - lhs) <= 1e-9);
  }
  CHECK_THROWS_AS(log_rate_minorant(1.0, 0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(log_rate_minorant(1.0, 1.0, 1.0, -1.0), Error);
}

TEST_CASE("lower-bound inequality on random tuples") {
  Rng rng(7);
  std::uniform_real_distribution<double> zdist(0.1, 10.0);
  double worst = -1e300;
  for (int i = 0; i < 10000; ++i) {
    const cdouble x = random_complex(rng, 10.0);
    const cdouble xb = random_complex(rng, 10.0);
    const double z = zdist(rng);
    const double zb = zdist(rng);
    const double lhs = std::log2(1.0 + std::norm(x) / z);
    worst = std::max(worst, log_rate_minorant(x, z, xb, zb) - lhs);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("MM coefficients: analytic single-user case") {
  Rng rng(8);
  const CVector h = complex_normal(3, rng);
  const double p_dl = 5.0;
  const EstimatedChannels est = single_user(h, CMatrix::Zero(3, 3));
  const MMCoefficients c = mm_coefficients(est, std::sqrt(p_dl) * h / h.norm());
  const double g = p_dl * h.squaredNorm();
  CHECK(c.a(0) == doctest::Approx(g / (g + 1.0)).epsilon(1e-13));
  CHECK(std::abs(c.b(0) - cdouble(std::sqrt(p_dl) * h.norm())) <= 1e-12 * std::sqrt(g));
  CHECK(c.z.norm() == 0.0);
}

TEST_CASE("MM coefficients match scalar evaluation") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const EstimatedChannels est = random_estimates(2, 2, rng);
    const Precoder p = random_precoder(2, 2, 2.0, rng);
    const MMCoefficients c = mm_coefficients(est, p);
    CMatrix z = CMatrix::Zero(2, 2);
    for (int k = 0; k < 2; ++k) {
      const double g = scalar_sinr(est, p, k);
      const cdouble x = est.h_hat.col(k).dot(p.col(k));
      const double denom = std::norm(x) / g;  // interference + error + noise
      CHECK(c.sinr(k) == doctest::Approx(g).epsilon(1e-12));
      CHECK(c.a(k) == doctest::Approx(g / (denom + std::norm(x))).epsilon(1e-12));
      CHECK(std::abs(c.b(k) - g / x) <= 1e-12 * std::abs(c.b(k)));
      z += c.a(k) * est.c_err[static_cast<std::size_t>(k)];
    }
    CHECK((c.z - z).norm() <= 1e-12 * z.norm());
    CHECK(c.sum_rate == doctest::Approx(scalar_sum_rate(est, p)).epsilon(1e-12));
  }
}

TEST_CASE("MM coefficients vanish for a zero column") {
  Rng rng(10);
  const EstimatedChannels est = random_estimates(3, 2, rng);
  Precoder p = random_precoder(3, 2, 1.0, rng);
  p.col(1).setZero();
  const MMCoefficients c = mm_coefficients(est, p);
  CHECK(c.a(1) == 0.0);
  CHECK(c.b(1) == cdouble(0.0));
  CHECK(c.a(0) > 0.0);
  CHECK_FALSE(c.dead());
  CHECK(mm_coefficients(est, Precoder::Zero(3, 2)).dead());
}

TEST_CASE("surrogate: tangency, minorization and the dead case") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 1 + trial % 8;
    const int k = 1 + trial % 4;
    const double p_dl = std::pow(10.0, (trial % 5) - 1.0);
    const EstimatedChannels est = random_estimates(m, k, rng);
    const Precoder p_bar = random_precoder(m, k, p_dl, rng);
    const MMCoefficients coeffs = mm_coefficients(est, p_bar);
    CHECK(std::abs(surrogate_value(p_bar, coeffs, est) - coeffs.sum_rate) <= 1e-9);
    for (int i = 0; i < 25; ++i) {
      Precoder p = random_precoder(m, k, p_dl, rng);
      p *= std::sqrt(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
      CHECK(surrogate_value(p, coeffs, est) <= sum_rate_lower_bound(est, p).sum_rate + 1e-9);
    }
  }
  const EstimatedChannels est = random_estimates(3, 2, rng);
  const Precoder zero = Precoder::Zero(3, 2);
  for (int i = 0; i < 10; ++i)
    CHECK(surrogate_value(random_precoder(3, 2, 4.0, rng), zero, est) == 0.0);
}

TEST_CASE("scaled surrogate: P / sqrt(beta) with the noise term also divided by beta") {
  Rng rng(12);
  const EstimatedChannels est = random_estimates(4, 3, rng);
  const Precoder p_bar = random_precoder(4, 3, 2.0, rng);
  const Precoder p = random_precoder(4, 3, 2.0, rng);
  const MMCoefficients c = mm_coefficients(est, p_bar);
  const double beta = 0.37;
  const double noise_shift = c.a.sum() * (1.0 / beta - 1.0) / std::log(2.0);
  CHECK(surrogate_value(p, c, est, beta) ==
        doctest::Approx(surrogate_value(p / std::sqrt(beta), c, est) - noise_shift).epsilon(1e-12));
}

TEST_CASE("shape validation") {
  Rng rng(13);
  const EstimatedChannels est = random_estimates(3, 2, rng);
  CHECK_THROWS_AS(sum_rate_lower_bound(est, Precoder::Zero(3, 3)), Error);
  CHECK_THROWS_AS(sinr_lower_bound(est, Precoder::Zero(3, 2), 2), Error);
  EstimatedChannels bad = est;
  bad.c_err.pop_back();
  CHECK_THROWS_AS(bad.validate(), Error);
}
