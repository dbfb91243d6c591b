// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

// Monte Carlo driver: power/pilot sweeps, convergence CDFs and per-user
// power-allocation reports.
//
// Trial t draws its covariances and true channels from Rng(seed + t). The
// training noise of every (t, T_dl, P_dl) cell comes from a second stream
// seeded by mix(seed + t), restarted per cell so that all powers see the
// same unit-variance noise realization scaled by 1/sqrt(P_dl). Results do
// not depend on the number of worker threads.

#ifndef MMPREC_HARNESS_HPP
#define MMPREC_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mmprec/metrics.hpp"
#include "mmprec/model.hpp"
#include "mmprec/precoders.hpp"

namespace mmprec {

struct CovarianceSpec {
  CovarianceModel base = CovarianceModel::exponential(16, 0.9);
  /// Rotate the shared model by an independent Haar unitary per user.
  bool rotate_per_user = true;
};

struct SweepSpec {
  SystemConfig config;  // num_pilots / downlink_power are taken from the grids
  std::vector<double> power_grid_db{0, 10, 20, 30, 40};
  std::vector<int> pilot_counts{4};
  int num_trials = 300;
  std::vector<SolverId> solvers{SolverId::kZf, SolverId::kMmLb};
  CovarianceSpec covariance;
  PilotStrategy pilots = PilotStrategy::kDftTruncated;
  SolverOptions options;
  int threads = 1;            // 0 = hardware concurrency
  bool record_timing = true;  // false writes zero wall times

  void validate() const;
};

struct TrialInput {
  std::vector<CMatrix> covariances;  // C_k
  CMatrix channels;                  // true h_k as columns, M x K
};

struct TrialRecord {
  SolverId solver = SolverId::kZf;
  double p_dl_db = 0.0;
  int t_dl = 0;
  int trial = 0;
  bool ok = false;
  std::string error;
  double sum_rate_lb = 0.0;  // robust lower bound with the true C_err
  double genie_rate = 0.0;   // perfect-CSI rate on the true channels
  int iterations = 0;
  double wall_time_s = 0.0;
  RVector user_power;        // ||p_k||^2
};

struct AggregateRecord {
  SolverId solver = SolverId::kZf;
  double p_dl_db = 0.0;
  int t_dl = 0;
  int num_ok = 0;
  int num_failed = 0;
  double mean_sum_rate_lb = 0.0;
  double mean_genie_rate = 0.0;
  double mean_iterations = 0.0;
  double median_iterations = 0.0;
  double mean_wall_time_s = 0.0;
};

struct SweepResult {
  /// Ordered by solver (as listed in the SweepSpec), power, pilot count, trial.
  std::vector<TrialRecord> records;
  /// One per (solver, power, pilot count), same order.
  std::vector<AggregateRecord> aggregates;
};

/// Covariances and true channels for one trial.
TrialInput draw_trial(const SweepSpec& spec, int trial_index);

/// Training, LMMSE estimation and error covariances for one cell.
EstimatedChannels estimate_trial(const SweepSpec& spec, const TrialInput& input,
                                 int trial_index, int t_dl, double p_dl);

/// Solves and evaluates one cell. Solver failures are captured in the record.
TrialRecord solve_trial(const TrialInput& input, const EstimatedChannels& est,
                        SolverId solver, double p_dl_db, int t_dl, int trial_index,
                        const SolverOptions& options, bool record_timing);

/// draw_trial + estimate_trial + solve_trial.
TrialRecord run_trial(const SweepSpec& spec, int trial_index, int t_dl, double p_dl_db,
                      SolverId solver);

SweepResult run_sweep(const SweepSpec& spec);

std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& records);

struct CdfPoint {
  SolverId solver = SolverId::kZf;
  double value = 0.0;
  double cumulative_fraction = 0.0;
};

struct ConvergenceCdf {
  std::vector<CdfPoint> iterations;
  std::vector<CdfPoint> wall_time;
};

/// Empirical CDFs of iteration counts and wall times over successful
/// records, per solver. Throws Error(kConfig) when no record succeeded.
ConvergenceCdf convergence_cdf(const std::vector<TrialRecord>& records);

/// Sorted distinct values with the fraction of samples <= each value.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

struct PowerAllocationReport {
  RVector power_fraction;  // ||p_k||^2 / P_dl
  std::vector<bool> active;
  int active_user_count = 0;
};

PowerAllocationReport power_allocation(const Precoder& p, double p_dl,
                                       double activity_threshold = 0.01);
PowerAllocationReport power_allocation(const RVector& user_power, double p_dl,
                                       double activity_threshold = 0.01);

double median(std::vector<double> values);

}  // namespace mmprec

#endif  // MMPREC_HARNESS_HPP
