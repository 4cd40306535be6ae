#ifndef FRACFLOW_VALIDATION_HPP
#define FRACFLOW_VALIDATION_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fracflow {

struct CheckResult {
  int criterion = 0;  // grouping id, 1-12
  std::string name;
  double achieved = 0.0;
  double required = 0.0;
  bool pass = false;
};

struct BatteryConfig {
  std::size_t n_paths = 100000;
  double ds = 2e-3;
  std::uint64_t master_seed = 20240811;
  int workers = 0;
  bool full = true;  // quick mode shrinks grids and skips the ds-halving run
};

// Cross-engine validation battery: closed forms vs quadrature vs Monte
// Carlo, identity residuals, kernel hypothesis probes, determinism. The
// checks and tolerances are fixed; only sampling sizes follow the config.
std::vector<CheckResult> run_battery(const BatteryConfig& cfg);

std::string render_report(const std::vector<CheckResult>& results);
bool all_pass(const std::vector<CheckResult>& results);

}  // namespace fracflow

#endif  // FRACFLOW_VALIDATION_HPP
