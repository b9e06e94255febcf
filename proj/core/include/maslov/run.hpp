#ifndef MASLOV_RUN_HPP
#define MASLOV_RUN_HPP

#include <string>

namespace maslov::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAssumption = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitDisagreement = 5;

struct Overrides {
  std::string out_dir = ".";
  int jobs = 0; // 0 = hardware concurrency
  bool keep_going = false;
  double tol = 0.0; // 0 = config / defaults
};

/// Loads the declarative problem config, runs the selected methods and
/// cross-checks, writes the JSON result document (deterministic bytes for a
/// fixed config and version) plus optional CSV trajectories. Timings go to a
/// sidecar file so the result document stays reproducible.
int run_command(const std::string& config_path, const Overrides& o);

/// Runs the config once per grid cell, emits a CSV table ordered by grid
/// index. Aborts on the first failing cell unless keep_going is set.
int sweep_command(const std::string& config_path, const Overrides& o);

std::string version_string();

} // namespace maslov::cli

#endif
