// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MMPREC_TYPES_HPP
#define MMPREC_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mmprec {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Random engine used everywhere. Streams are derived from a master seed.
using Rng = std::mt19937_64;

/// Error categories. Values match the C API status codes.
enum class ErrorKind : int {
  kConfig = 1,        // invalid input or configuration
  kIo = 2,            // file system failure
  kDefect = 3,        // numerical or internal failure that should not happen
  kDegenerate = 4,    // rank-deficient channel estimate (ZF impossible)
  kStalled = 5,       // every MM coefficient vanished; solver cannot move
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Dimensions and power of one downlink setup.
struct SystemConfig {
  int num_antennas = 16;      // M
  int num_users = 4;          // K
  int num_pilots = 4;         // T_dl
  double downlink_power = 1;  // P_dl, linear scale
  std::uint64_t rng_seed = 1;

  /// Throws Error(kConfig) when an invariant is violated.
  void validate() const;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Per-user LMMSE estimate with its error covariance.
struct ChannelEstimate {
  CVector h_hat;
  CMatrix c_err;
};

/// Column k holds user k's precoding vector.
using Precoder = CMatrix;

/// Stacks the estimated channels column-wise into an M x K matrix.
CMatrix stack_estimates(const std::vector<ChannelEstimate>& estimates);

}  // namespace mmprec

#endif  // MMPREC_TYPES_HPP
