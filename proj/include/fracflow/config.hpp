#ifndef FRACFLOW_CONFIG_HPP
#define FRACFLOW_CONFIG_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracflow/solve_mc.hpp"

namespace fracflow {

// Schema violations carry the offending key so the CLI can name it.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Method { mc, quad, closed_form };

struct GridSpec {
  std::vector<double> points;                   // 1-d
  std::vector<std::array<double, 2>> points2d;  // mixed
};

struct RunConfig {
  ProblemSpec problem;
  Method method = Method::mc;
  GridSpec grid;
  McConfig mc;
  std::string output;
  bool report = false;
  // constant orders when the kernels are of "stable" type (quad engines
  // need them); 0 marks a general kernel
  double beta = 0.0;
  double beta2 = 0.0;
};

// Parses and validates a full solve-* configuration document. Unknown keys
// anywhere raise ConfigError naming the key. method = quad / closed_form
// demand a constant-order ("stable") kernel, enforced at parse time.
RunConfig parse_run_config(const std::string& json_text,
                           OperatorKind expected_kind);

struct MlConfig {
  double beta = 0.5;
  double beta2 = 0.0;  // 0: one-parameter function
  std::vector<double> grid;
  std::string output;
};
MlConfig parse_ml_config(const std::string& json_text);

struct DensityConfig {
  double beta = 0.5;
  std::vector<double> grid;
  std::string output;
};
DensityConfig parse_density_config(const std::string& json_text);

struct ExitLawConfig {
  JumpKernel kernel;
  double kernel_beta = 0.0;  // > 0 for the constant-order family
  double lambda = 1.0;
  double t = 1.0;
  double a = 0.0;
  std::vector<double> grid;  // s-grid for the density table
  McConfig mc;               // sampling route for general kernels
  std::string output;
};
ExitLawConfig parse_exit_law_config(const std::string& json_text);

struct ValidateConfig {
  std::size_t n_paths = 20000;
  double ds = 2e-3;
  std::uint64_t master_seed = 20240811;
  int workers = 0;
  bool quick = true;  // full acceptance sizes when false
  std::string output;
};
ValidateConfig parse_validate_config(const std::string& json_text);

}  // namespace fracflow

#endif  // FRACFLOW_CONFIG_HPP
