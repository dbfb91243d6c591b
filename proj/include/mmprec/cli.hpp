// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

// Run configuration and the sweep / convergence / allocation commands.
//
// Configuration files are flat `section.key = value` lines. `#` starts a
// comment, blank lines are ignored, lists are comma separated, unknown or
// repeated keys are errors reported with their line number.

#ifndef MMPREC_CLI_HPP
#define MMPREC_CLI_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mmprec/harness.hpp"

namespace mmprec {

struct RunConfig {
  SweepSpec sweep;
  double allocation_power_db = 40.0;
  int allocation_pilot_count = 0;  // 0: first entry of sweep.pilot_counts
  double activity_threshold = 0.01;
  std::string output_dir = ".";

  /// The single-cell sweep used by the allocation command.
  SweepSpec allocation_spec() const;
};

/// One documented configuration key with its default value.
struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view help;
};
const std::vector<ConfigKey>& config_keys();

/// Throws Error(kConfig) with a "line N: ..." message on malformed input.
RunConfig parse_run_config(std::string_view text);
/// Throws Error(kIo) when the file cannot be read.
RunConfig load_run_config(const std::string& path);

/// Shortest text that parses back to the same double (17 significant digits).
std::string format_double(double v);

void write_sweep_csv(std::ostream& os, const std::vector<TrialRecord>& records);
void write_sweep_agg_csv(std::ostream& os, const std::vector<AggregateRecord>& aggregates);
void write_cdf_csv(std::ostream& os, const std::vector<CdfPoint>& points);
void write_allocation_csv(std::ostream& os, const std::vector<TrialRecord>& records,
                          double p_dl, double activity_threshold);

/// Each command writes its CSV files into out_dir (created if missing) and
/// returns a one-line summary. Errors are thrown as mmprec::Error.
std::string cmd_sweep(const RunConfig& config, const std::string& out_dir);
std::string cmd_convergence(const RunConfig& config, const std::string& out_dir);
std::string cmd_allocation(const RunConfig& config, const std::string& out_dir);

}  // namespace mmprec

#endif  // MMPREC_CLI_HPP
