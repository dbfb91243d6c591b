// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#include "mmprec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "mmprec/estimation.hpp"

namespace mmprec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t channel_seed(const SweepSpec& spec, int trial) {
  return spec.config.rng_seed + static_cast<std::uint64_t>(trial);
}

std::uint64_t noise_seed(const SweepSpec& spec, int trial) {
  return splitmix64(channel_seed(spec, trial));
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void SweepSpec::validate() const {
  if (config.num_antennas < 1 || config.num_users < 1)
    throw Error(ErrorKind::kConfig, "M and K must be >= 1");
  if (num_trials < 1) throw Error(ErrorKind::kConfig, "num_trials must be >= 1");
  if (power_grid_db.empty()) throw Error(ErrorKind::kConfig, "power grid is empty");
  if (pilot_counts.empty()) throw Error(ErrorKind::kConfig, "pilot_counts is empty");
  if (solvers.empty()) throw Error(ErrorKind::kConfig, "no solvers selected");
  for (double db : power_grid_db)
    if (!std::isfinite(db)) throw Error(ErrorKind::kConfig, "power grid entries must be finite");
  for (int t : pilot_counts)
    if (t < 1 || t > config.num_antennas)
      throw Error(ErrorKind::kConfig, "pilot counts must satisfy 1 <= T_dl <= M");
  if (covariance.base.dimension != config.num_antennas)
    throw Error(ErrorKind::kConfig, "covariance dimension must equal M");
  if (pilots == PilotStrategy::kExplicit)
    throw Error(ErrorKind::kConfig, "sweeps support dft_truncated and covariance_eigenvectors pilots");
  if (threads < 0) throw Error(ErrorKind::kConfig, "threads must be >= 0");
  options.validate();
}

TrialInput draw_trial(const SweepSpec& spec, int trial_index) {
  const int m = spec.config.num_antennas;
  const int k_users = spec.config.num_users;
  Rng rng(channel_seed(spec, trial_index));
  const CMatrix base = generate_covariance(spec.covariance.base);
  TrialInput in;
  in.covariances.reserve(static_cast<std::size_t>(k_users));
  in.channels.resize(m, k_users);
  for (int k = 0; k < k_users; ++k) {
    CMatrix c = base;
    if (spec.covariance.rotate_per_user) {
      const CMatrix u = random_unitary(m, rng);
      c = u * base * u.adjoint();
      c = 0.5 * (c + c.adjoint()).eval();
    }
    in.channels.col(k) = sample_channel(c, rng);
    in.covariances.push_back(std::move(c));
  }
  return in;
}

EstimatedChannels estimate_trial(const SweepSpec& spec, const TrialInput& input,
                                 int trial_index, int t_dl, double p_dl) {
  const int m = spec.config.num_antennas;
  std::optional<CMatrix> c_avg;
  if (spec.pilots == PilotStrategy::kCovarianceEigenvectors) {
    CMatrix avg = CMatrix::Zero(m, m);
    for (const auto& c : input.covariances) avg += c;
    c_avg = avg / static_cast<double>(input.covariances.size());
  }
  const PilotMatrix pilots = build_pilot_matrix(m, t_dl, spec.pilots, c_avg);
  Rng noise(noise_seed(spec, trial_index));
  std::vector<ChannelEstimate> estimates;
  estimates.reserve(input.covariances.size());
  for (std::size_t k = 0; k < input.covariances.size(); ++k) {
    const CVector h = input.channels.col(static_cast<Eigen::Index>(k));
    const CVector y = simulate_training(h, pilots, p_dl, noise);
    const LmmseEstimator estimator(input.covariances[k], pilots, p_dl);
    estimates.push_back(estimator.estimate(y));
  }
  return EstimatedChannels::from(estimates);
}

TrialRecord solve_trial(const TrialInput& input, const EstimatedChannels& est,
                        SolverId solver, double p_dl_db, int t_dl, int trial_index,
                        const SolverOptions& options, bool record_timing) {
  TrialRecord r;
  r.solver = solver;
  r.p_dl_db = p_dl_db;
  r.t_dl = t_dl;
  r.trial = trial_index;
  const double p_dl = db_to_linear(p_dl_db);
  try {
    const SolverResult res = solve(solver, est, p_dl, options);
    r.sum_rate_lb = sum_rate_lower_bound(est, res.precoder).sum_rate;
    r.genie_rate = perfect_csi_sum_rate(input.channels, res.precoder);
    r.iterations = res.trace.iterations_used;
    r.wall_time_s = record_timing ? res.trace.wall_time_seconds : 0.0;
    r.user_power = res.precoder.colwise().squaredNorm().transpose();
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
    r.user_power = RVector::Zero(est.num_users());
  }
  return r;
}

TrialRecord run_trial(const SweepSpec& spec, int trial_index, int t_dl, double p_dl_db,
                      SolverId solver) {
  const TrialInput in = draw_trial(spec, trial_index);
  const EstimatedChannels est = estimate_trial(spec, in, trial_index, t_dl, db_to_linear(p_dl_db));
  return solve_trial(in, est, solver, p_dl_db, t_dl, trial_index, spec.options,
                     spec.record_timing);
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t n_solvers = spec.solvers.size();
  const std::size_t n_powers = spec.power_grid_db.size();
  const std::size_t n_pilots = spec.pilot_counts.size();
  const std::size_t n_trials = static_cast<std::size_t>(spec.num_trials);
  auto slot = [&](std::size_t s, std::size_t p, std::size_t t, std::size_t trial) {
    return ((s * n_powers + p) * n_pilots + t) * n_trials + trial;
  };

  SweepResult result;
  result.records.resize(n_solvers * n_powers * n_pilots * n_trials);

  std::atomic<int> next_trial{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int trial = next_trial++; trial < spec.num_trials; trial = next_trial++) {
      try {
        const TrialInput in = draw_trial(spec, trial);
        for (std::size_t t = 0; t < n_pilots; ++t) {
          for (std::size_t p = 0; p < n_powers; ++p) {
            const double db = spec.power_grid_db[p];
            const int t_dl = spec.pilot_counts[t];
            const EstimatedChannels est = estimate_trial(spec, in, trial, t_dl, db_to_linear(db));
            for (std::size_t s = 0; s < n_solvers; ++s)
              result.records[slot(s, p, t, static_cast<std::size_t>(trial))] =
                  solve_trial(in, est, spec.solvers[s], db, t_dl, trial, spec.options,
                              spec.record_timing);
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int n_threads = std::min(resolve_threads(spec.threads), spec.num_trials);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.aggregates = aggregate(result.records);
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& records) {
  // Keys in first-appearance order so output follows the record order.
  std::vector<std::tuple<SolverId, double, int>> keys;
  std::map<std::tuple<int, double, int>, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    const auto key = std::make_tuple(static_cast<int>(r.solver), r.p_dl_db, r.t_dl);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.emplace_back(r.solver, r.p_dl_db, r.t_dl);
    it->second.push_back(&r);
  }
  std::vector<AggregateRecord> out;
  out.reserve(keys.size());
  for (const auto& [solver, db, t_dl] : keys) {
    AggregateRecord a;
    a.solver = solver;
    a.p_dl_db = db;
    a.t_dl = t_dl;
    std::vector<double> iterations;
    for (const TrialRecord* r : groups.at(std::make_tuple(static_cast<int>(solver), db, t_dl))) {
      if (!r->ok) {
        ++a.num_failed;
        continue;
      }
      ++a.num_ok;
      a.mean_sum_rate_lb += r->sum_rate_lb;
      a.mean_genie_rate += r->genie_rate;
      a.mean_iterations += r->iterations;
      a.mean_wall_time_s += r->wall_time_s;
      iterations.push_back(r->iterations);
    }
    if (a.num_ok > 0) {
      const double n = a.num_ok;
      a.mean_sum_rate_lb /= n;
      a.mean_genie_rate /= n;
      a.mean_iterations /= n;
      a.mean_wall_time_s /= n;
      a.median_iterations = median(std::move(iterations));
    }
    out.push_back(a);
  }
  return out;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> cdf;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    cdf.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

ConvergenceCdf convergence_cdf(const std::vector<TrialRecord>& records) {
  std::vector<SolverId> order;
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> samples;
  for (const auto& r : records) {
    if (!r.ok) continue;
    auto [it, inserted] = samples.try_emplace(static_cast<int>(r.solver));
    if (inserted) order.push_back(r.solver);
    it->second.first.push_back(r.iterations);
    it->second.second.push_back(r.wall_time_s);
  }
  if (order.empty()) throw Error(ErrorKind::kConfig, "no successful records for a CDF");
  ConvergenceCdf out;
  for (SolverId s : order) {
    auto& [iters, times] = samples.at(static_cast<int>(s));
    for (const auto& [v, f] : empirical_cdf(iters)) out.iterations.push_back({s, v, f});
    for (const auto& [v, f] : empirical_cdf(times)) out.wall_time.push_back({s, v, f});
  }
  return out;
}

PowerAllocationReport power_allocation(const RVector& user_power, double p_dl,
                                       double activity_threshold) {
  if (!(p_dl > 0.0)) throw Error(ErrorKind::kConfig, "P_dl must be positive");
  PowerAllocationReport r;
  r.power_fraction = user_power / p_dl;
  r.active.resize(static_cast<std::size_t>(user_power.size()));
  for (Eigen::Index k = 0; k < user_power.size(); ++k) {
    const bool on = r.power_fraction(k) > activity_threshold;
    r.active[static_cast<std::size_t>(k)] = on;
    r.active_user_count += on ? 1 : 0;
  }
  return r;
}

PowerAllocationReport power_allocation(const Precoder& p, double p_dl,
                                       double activity_threshold) {
  return power_allocation(RVector(p.colwise().squaredNorm().transpose()), p_dl,
                          activity_threshold);
}

}  // namespace mmprec
