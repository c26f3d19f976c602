#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace envydiv {

enum ExitCode : int {
  exit_ok = 0,
  exit_budget = 2,
  exit_validation = 3,
  exit_input = 4,
  exit_resource = 5,
};

struct RunConfig {
  std::string command; ///< solve, validate, topology, demo, brute
  std::optional<int> r;
  std::optional<std::string> space;
  std::string prefs;
  double tolerance = 1e-6;
  int max_depth = 12;
  int multistarts = 32;
  std::uint64_t seed = 20240611;
  unsigned threads = 0;
  bool raise_bottleneck = false;
  // topology
  std::string complex;
  std::optional<int> m;
  std::optional<int> n;
  bool pseudomanifold = false;
  // demo
  std::string demo;
  // brute
  int grid = 31;
  // validate
  std::vector<std::string> properties;
  int samples = 1000;
};

/// Writes JSON to `out` and human-readable progress to `log`; returns the exit code.
int run(const RunConfig &config, std::ostream &out, std::ostream &log);

int run_solve(const RunConfig &config, std::ostream &out, std::ostream &log);
int run_validate(const RunConfig &config, std::ostream &out, std::ostream &log);
int run_topology(const RunConfig &config, std::ostream &out, std::ostream &log);
int run_demo(const RunConfig &config, std::ostream &out, std::ostream &log);
int run_brute(const RunConfig &config, std::ostream &out, std::ostream &log);

} // namespace envydiv
