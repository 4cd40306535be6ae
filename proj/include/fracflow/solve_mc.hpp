#ifndef FRACFLOW_SOLVE_MC_HPP
#define FRACFLOW_SOLVE_MC_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fracflow/kernels.hpp"
#include "fracflow/solution.hpp"

namespace fracflow {

enum class OperatorKind { caputo, rl, mixed };

// One linear equation instance. For the mixed problem `kernel` drives the
// killed t1-coordinate and `kernel2` the stopped t2-coordinate; phi is the
// boundary function on the t1-axis and must vanish at 0.
struct ProblemSpec {
  OperatorKind kind = OperatorKind::caputo;
  JumpKernel kernel;
  std::optional<JumpKernel> kernel2;
  double lambda = 0.0;
  std::function<double(double)> g;
  std::function<double(double, double)> g2;
  double u_a = 0.0;
  std::function<double(double)> phi;
  double a = 0.0, b = 1.0;
  double b1 = 1.0, b2 = 1.0;
  std::vector<double> g_breakpoints;
};

struct McConfig {
  std::size_t n_paths = 100000;
  double ds = 2e-3;
  std::uint64_t master_seed = 20240101;
  double horizon_override = -1.0;  // <= 0: derived from the horizon policy
  double eps_cut_frac = 1e-4;      // thinning cutoff, fraction of (b - a)
  int workers = 0;                 // 0: default_workers()
};

// Monte Carlo engines. Per-path streams are derived from (master_seed, path
// index), so results are reproducible and independent of the worker count.
// Constant-order kernels share one subordinator sweep across the whole grid
// (common random numbers); state-dependent kernels are simulated per point.
SolutionCurve solve_rl_mc(const ProblemSpec& spec,
                          const std::vector<double>& grid,
                          const McConfig& cfg = {});

SolutionCurve solve_caputo_mc(const ProblemSpec& spec,
                              const std::vector<double>& grid,
                              const McConfig& cfg = {});

SolutionCurve solve_mixed_mc(const ProblemSpec& spec,
                             const std::vector<std::array<double, 2>>& grid2d,
                             const McConfig& cfg = {});

McEstimate laplace_exit_mc(const JumpKernel& k, double lambda, double t,
                           double a, const McConfig& cfg = {});

// Horizon policy: 50/lambda for lambda > 0; for lambda = 0 an expected-exit
// bound from the near-zero intensity floor, times 50.
double horizon_policy(const JumpKernel& k, double lambda, double a, double b,
                      std::vector<std::string>* warnings = nullptr);

}  // namespace fracflow

#endif  // FRACFLOW_SOLVE_MC_HPP
