// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

// mmprec command line: runs the sweep / convergence / allocation experiments
// through the C API and writes CSV files.

#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mmprec/mmprec.h"

namespace {

struct ConfigDeleter {
  void operator()(mmprec_run_config* c) const { mmprec_run_config_destroy(c); }
};
using ConfigHandle = std::unique_ptr<mmprec_run_config, ConfigDeleter>;

int exit_code(mmprec_status st) {
  switch (st) {
    case MMPREC_OK:
    case MMPREC_ERR_CONFIG:
    case MMPREC_ERR_IO:
    case MMPREC_ERR_INTERNAL:
      return static_cast<int>(st);
    default:
      return static_cast<int>(MMPREC_ERR_INTERNAL);
  }
}

int report(mmprec_status st) {
  if (st == MMPREC_OK) {
    std::cerr << mmprec_last_message() << '\n';
  } else {
    std::cerr << "error (" << mmprec_status_string(st) << "): " << mmprec_last_message() << '\n';
  }
  return exit_code(st);
}

std::string config_key_help() {
  std::ostringstream os;
  os << "\nConfiguration keys (key = default):\n";
  for (std::size_t i = 0; i < mmprec_config_key_count(); ++i) {
    const char* name = nullptr;
    const char* def = nullptr;
    const char* help = nullptr;
    mmprec_config_key(i, &name, &def, &help);
    os << "  " << name << " = " << (*def ? def : "(unset)") << "\n      " << help << '\n';
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust MU-MISO precoding experiments (libmmprec " +
               std::string(mmprec_version()) + ")"};
  app.require_subcommand(1);
  app.footer(config_key_help());

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (default: output.dir)");
    sub->add_option("--seed", seed, "master seed, overrides system.seed");
    sub->add_option("--threads", threads, "worker threads, 0 = auto (overrides run.threads)")
        ->check(CLI::NonNegativeNumber);
  };
  CLI::App* sweep = app.add_subcommand("sweep", "sum rate vs. power: sweep.csv, sweep_agg.csv");
  CLI::App* conv = app.add_subcommand(
      "convergence", "iteration/runtime CDFs: cdf_iterations.csv, cdf_runtime.csv");
  CLI::App* alloc = app.add_subcommand("allocation", "per-user power fractions: allocation.csv");
  for (CLI::App* sub : {sweep, conv, alloc}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(MMPREC_ERR_CONFIG);
  }

  mmprec_run_config* raw = nullptr;
  mmprec_status st = mmprec_run_config_load(config_path.c_str(), &raw);
  if (st != MMPREC_OK) return report(st);
  ConfigHandle config(raw);
  if (seed) mmprec_run_config_set_seed(config.get(), *seed);
  if (threads >= 0) mmprec_run_config_set_threads(config.get(), threads);

  const char* dir = out_dir.empty() ? nullptr : out_dir.c_str();
  if (sweep->parsed()) {
    st = mmprec_cmd_sweep(config.get(), dir);
  } else if (conv->parsed()) {
    st = mmprec_cmd_convergence(config.get(), dir);
  } else {
    st = mmprec_cmd_allocation(config.get(), dir);
  }
  return report(st);
}
