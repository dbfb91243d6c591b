// Copyright 2026 The mmprec Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mmprec/cli.hpp"

namespace mmprec {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorKind::kConfig, "line " + std::to_string(line) + ": " + msg);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const Entry& at(const std::string& key) const { return entries_.at(key); }

  template <typename T>
  T number(const std::string& key, T fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return parse_number<T>(it->second.value, it->second.line, key);
  }

  template <typename T>
  std::vector<T> list(const std::string& key, std::vector<T> fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<T> out;
    for (const std::string& item : split(it->second.value))
      out.push_back(parse_number<T>(item, it->second.line, key));
    if (out.empty()) fail(it->second.line, "'" + key + "' needs at least one value");
    return out;
  }

  std::string text(const std::string& key, std::string fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(it->second.line, "'" + key + "' expects true or false, got '" + v + "'");
  }

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string_view t = trim(item);
      if (!t.empty()) out.emplace_back(t);
    }
    return out;
  }

  template <typename T>
  static T parse_number(std::string_view text, int line, const std::string& key) {
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      fail(line, "'" + key + "' has invalid numeric value '" + std::string(text) + "'");
    return value;
  }

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"system.num_antennas", "16", "number of BS antennas M"},
      {"system.num_users", "8", "number of single-antenna users K"},
      {"system.seed", "1", "master RNG seed; trial t uses seed + t"},
      {"sweep.power_grid_db", "0,10,20,30,40", "downlink powers P_dl in dB"},
      {"sweep.pilot_counts", "4", "pilot counts T_dl (each 1..M)"},
      {"sweep.num_trials", "300", "channel realizations per cell"},
      {"sweep.solvers", "zf,mm_lb", "subset of zf,mm_lb,mm_lb_inst,mm_bisec,mmplus"},
      {"channel.covariance", "exponential", "identity | exponential | diagonal"},
      {"channel.rho", "0.9", "exponential correlation coefficient in [0,1)"},
      {"channel.diagonal", "", "M positive entries for the diagonal model"},
      {"channel.rotate", "true", "rotate the shared model per user by a Haar unitary"},
      {"pilots.strategy", "dft_truncated", "dft_truncated | covariance_eigenvectors"},
      {"solver.max_iterations", "500", "MM iteration cap (mm_lb, mm_lb_inst, mm_bisec)"},
      {"solver.max_iterations_mmplus", "2000", "MM iteration cap for mmplus"},
      {"solver.rel_tolerance", "1e-6", "stop when the relative lower-bound change is below this"},
      {"solver.bisection_tolerance", "1e-8", "relative power tolerance of the bisection"},
      {"solver.bisection_max_steps", "200", "bisection step and bracket-doubling cap"},
      {"allocation.power_db", "40", "P_dl in dB for the allocation command"},
      {"allocation.pilot_count", "", "T_dl for the allocation command (default: first pilot count)"},
      {"allocation.activity_threshold", "0.01", "power fraction above which a user is active"},
      {"run.threads", "1", "worker threads, 0 = hardware concurrency"},
      {"output.dir", ".", "output directory (overridden by --out)"},
      {"output.record_timing", "true", "false writes zero wall times for byte-reproducible CSVs"},
  };
  return keys;
}

SweepSpec RunConfig::allocation_spec() const {
  SweepSpec s = sweep;
  s.power_grid_db = {allocation_power_db};
  s.pilot_counts = {allocation_pilot_count > 0 ? allocation_pilot_count : sweep.pilot_counts.front()};
  return s;
}

RunConfig parse_run_config(std::string_view text) {
  std::set<std::string_view> known;
  for (const auto& k : config_keys()) known.insert(k.name);

  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(line_no, "missing key before '='");
    if (!known.count(key)) fail(line_no, "unknown key '" + key + "'");
    if (entries.count(key)) fail(line_no, "duplicate key '" + key + "'");
    entries.emplace(key, Entry{value, line_no});
  }

  const Reader r(std::move(entries));
  RunConfig cfg;
  SweepSpec& s = cfg.sweep;
  s.config.num_antennas = r.number<int>("system.num_antennas", 16);
  s.config.num_users = r.number<int>("system.num_users", 8);
  s.config.rng_seed = r.number<std::uint64_t>("system.seed", 1);
  s.power_grid_db = r.list<double>("sweep.power_grid_db", {0, 10, 20, 30, 40});
  s.pilot_counts = r.list<int>("sweep.pilot_counts", {4});
  s.num_trials = r.number<int>("sweep.num_trials", 300);

  if (r.has("sweep.solvers")) {
    const Entry& e = r.at("sweep.solvers");
    s.solvers.clear();
    for (const std::string& name : Reader::split(e.value)) {
      try {
        s.solvers.push_back(parse_solver(name));
      } catch (const Error& err) {
        fail(e.line, err.what());
      }
    }
    if (s.solvers.empty()) fail(e.line, "'sweep.solvers' needs at least one solver");
  }

  const int m = s.config.num_antennas;
  if (m < 1) fail(r.has("system.num_antennas") ? r.at("system.num_antennas").line : 0,
                  "system.num_antennas must be >= 1");
  const std::string kind = r.text("channel.covariance", "exponential");
  if (kind == "identity") {
    s.covariance.base = CovarianceModel::identity(m);
  } else if (kind == "exponential") {
    s.covariance.base = CovarianceModel::exponential(m, r.number<double>("channel.rho", 0.9));
  } else if (kind == "diagonal") {
    const std::vector<double> d = r.list<double>("channel.diagonal", {});
    if (static_cast<int>(d.size()) != m)
      fail(r.has("channel.diagonal") ? r.at("channel.diagonal").line : r.at("channel.covariance").line,
           "channel.diagonal needs exactly system.num_antennas entries");
    s.covariance.base = CovarianceModel::diag(Eigen::Map<const RVector>(d.data(), m));
  } else {
    fail(r.at("channel.covariance").line, "unknown covariance model '" + kind + "'");
  }
  s.covariance.rotate_per_user = r.boolean("channel.rotate", true);

  const std::string pilots = r.text("pilots.strategy", "dft_truncated");
  if (pilots == "dft_truncated") {
    s.pilots = PilotStrategy::kDftTruncated;
  } else if (pilots == "covariance_eigenvectors") {
    s.pilots = PilotStrategy::kCovarianceEigenvectors;
  } else {
    fail(r.at("pilots.strategy").line, "unknown pilot strategy '" + pilots + "'");
  }

  s.options.max_iterations = r.number<int>("solver.max_iterations", 500);
  s.options.max_iterations_mmplus = r.number<int>("solver.max_iterations_mmplus", 2000);
  s.options.rel_tolerance = r.number<double>("solver.rel_tolerance", 1e-6);
  s.options.bisection_tolerance = r.number<double>("solver.bisection_tolerance", 1e-8);
  s.options.bisection_max_steps = r.number<int>("solver.bisection_max_steps", 200);
  s.threads = r.number<int>("run.threads", 1);
  s.record_timing = r.boolean("output.record_timing", true);

  cfg.allocation_power_db = r.number<double>("allocation.power_db", 40.0);
  cfg.allocation_pilot_count = r.number<int>("allocation.pilot_count", 0);
  cfg.activity_threshold = r.number<double>("allocation.activity_threshold", 0.01);
  cfg.output_dir = r.text("output.dir", ".");

  // Semantic checks after all keys are known; these have no single line.
  try {
    s.validate();
    generate_covariance(s.covariance.base);
    if (cfg.allocation_pilot_count < 0 || cfg.allocation_pilot_count > m)
      throw Error(ErrorKind::kConfig, "allocation.pilot_count must satisfy 0 <= T_dl <= M");
    if (!(cfg.activity_threshold >= 0.0 && cfg.activity_threshold < 1.0))
      throw Error(ErrorKind::kConfig, "allocation.activity_threshold must lie in [0, 1)");
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace mmprec
