// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include "mmprec/cli.hpp"

namespace mmprec {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  body(f);
  f.flush();
  if (!f) throw Error(ErrorKind::kIo, "write to '" + path.string() + "' failed");
}

fs::path prepare_dir(const std::string& out_dir) {
  const fs::path dir(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorKind::kIo, "cannot create output directory '" + dir.string() + "'");
  return dir;
}

int count_failed(const std::vector<TrialRecord>& records) {
  int n = 0;
  for (const auto& r : records) n += r.ok ? 0 : 1;
  return n;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << "solver,p_dl_db,t_dl,trial,sum_rate_lb,genie_rate,iterations,wall_time_s,status\n";
  for (const auto& r : records) {
    os << solver_name(r.solver) << ',' << format_double(r.p_dl_db) << ',' << r.t_dl << ','
       << r.trial << ',';
    if (r.ok) {
      os << format_double(r.sum_rate_lb) << ',' << format_double(r.genie_rate) << ','
         << r.iterations << ',' << format_double(r.wall_time_s) << ",ok\n";
    } else {
      os << ",,,,failed\n";
    }
  }
}

void write_sweep_agg_csv(std::ostream& os, const std::vector<AggregateRecord>& aggregates) {
  os << "solver,p_dl_db,t_dl,num_ok,num_failed,mean_sum_rate_lb,mean_genie_rate,"
        "mean_iterations,median_iterations,mean_wall_time_s\n";
  for (const auto& a : aggregates) {
    os << solver_name(a.solver) << ',' << format_double(a.p_dl_db) << ',' << a.t_dl << ','
       << a.num_ok << ',' << a.num_failed << ',' << format_double(a.mean_sum_rate_lb) << ','
       << format_double(a.mean_genie_rate) << ',' << format_double(a.mean_iterations) << ','
       << format_double(a.median_iterations) << ',' << format_double(a.mean_wall_time_s)
       << '\n';
  }
}

void write_cdf_csv(std::ostream& os, const std::vector<CdfPoint>& points) {
  os << "solver,value,cumulative_fraction\n";
  for (const auto& p : points)
    os << solver_name(p.solver) << ',' << format_double(p.value) << ','
       << format_double(p.cumulative_fraction) << '\n';
}

void write_allocation_csv(std::ostream& os, const std::vector<TrialRecord>& records,
                          double p_dl, double activity_threshold) {
  os << "solver,trial,user,power_fraction,active\n";
  for (const auto& r : records) {
    if (!r.ok) continue;
    const PowerAllocationReport rep = power_allocation(r.user_power, p_dl, activity_threshold);
    for (Eigen::Index k = 0; k < rep.power_fraction.size(); ++k)
      os << solver_name(r.solver) << ',' << r.trial << ',' << k << ','
         << format_double(rep.power_fraction(k)) << ','
         << (rep.active[static_cast<std::size_t>(k)] ? 1 : 0) << '\n';
  }
}

std::string cmd_sweep(const RunConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_dir(out_dir);
  const SweepResult res = run_sweep(config.sweep);
  write_file(dir / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, res.records); });
  write_file(dir / "sweep_agg.csv",
             [&](std::ostream& os) { write_sweep_agg_csv(os, res.aggregates); });
  return "sweep: " + std::to_string(res.records.size()) + " trial records (" +
         std::to_string(count_failed(res.records)) + " failed) -> " + dir.string();
}

std::string cmd_convergence(const RunConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_dir(out_dir);
  const SweepResult res = run_sweep(config.sweep);
  const ConvergenceCdf cdf = convergence_cdf(res.records);
  write_file(dir / "cdf_iterations.csv",
             [&](std::ostream& os) { write_cdf_csv(os, cdf.iterations); });
  write_file(dir / "cdf_runtime.csv",
             [&](std::ostream& os) { write_cdf_csv(os, cdf.wall_time); });
  return "convergence: " + std::to_string(res.records.size()) + " trial records (" +
         std::to_string(count_failed(res.records)) + " failed) -> " + dir.string();
}

std::string cmd_allocation(const RunConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare_dir(out_dir);
  const SweepSpec spec = config.allocation_spec();
  const SweepResult res = run_sweep(spec);
  const double p_dl = db_to_linear(config.allocation_power_db);
  write_file(dir / "allocation.csv", [&](std::ostream& os) {
    write_allocation_csv(os, res.records, p_dl, config.activity_threshold);
  });
  return "allocation: " + std::to_string(res.records.size()) + " trial records (" +
         std::to_string(count_failed(res.records)) + " failed) -> " + dir.string();
}

}  // namespace mmprec
