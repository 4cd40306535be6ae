#ifndef FRACFLOW_PATHS_HPP
#define FRACFLOW_PATHS_HPP

#include <functional>
#include <limits>
#include <vector>

#include "fracflow/kernels.hpp"
#include "fracflow/rng.hpp"

namespace fracflow {

// stopped: the path lands exactly at the barrier on its first crossing;
// killed: the path terminates there instead.
enum class PathMode { stopped, killed };

struct PathSample {
  std::vector<double> times;   // filled only when recording is requested
  std::vector<double> states;  // nonincreasing
  double exit_time = 0.0;      // step-resolution estimate of tau
  bool exited = false;
  double functional = 0.0;     // Int_0^tau e^{-lambda s} g(T(s)) ds
  double exit_discount = 1.0;  // e^{-lambda * min(tau, horizon)}
  double state_at_query = std::numeric_limits<double>::quiet_NaN();
};

struct SimOptions {
  PathMode mode = PathMode::stopped;
  double ds = 2e-3;
  double lambda = 0.0;
  std::function<double(double)> g;  // empty: functional stays 0
  double horizon = 50.0;
  double eps_cut = 1e-4;  // jump-size cutoff for thinning (absolute)
  bool record = false;
  double query_time = -1.0;  // >= 0: capture the state at this clock value
};

// Simulates the nonincreasing process started at t0 until it crosses `a` or
// the horizon runs out. Constant-order stable kernels use exact increments;
// anything else uses frozen-coefficient thinning per step (large jumps above
// eps_cut at the kernel's own tail rate, sizes by rejection against the
// envelope; sub-eps_cut jumps replaced by their drift compensation).
PathSample simulate_path(const JumpKernel& k, double t0, double a,
                         const SimOptions& opt, PathRng& rng);

// tau for the constant-order kernel started at t, exactly in law: the first
// crossing of level t-a by a subordinator, ((t-a)/W)^beta for a standard W.
double sample_exit_time_stable_exact(double beta, double t, double a,
                                     PathRng& rng);

// Density of tau for the constant-order kernel:
//   mu_a^t(s) = (1/beta)(t-a) s^{-1/beta-1} w_beta((t-a) s^{-1/beta}).
double exit_time_density_stable(double beta, double t, double a, double s);

// Joint density of (T(s), tau) at (r, xi) for the stopped constant-order
// process started at t: 1_{s<xi} p_s(t,r) mu_a^r(xi - s), where
// p_s(t,r) = s^{-1/beta} w_beta(s^{-1/beta}(t-r)). Zero outside the support.
double joint_density_stable(double beta, double t, double a, double s,
                            double r, double xi);

}  // namespace fracflow

#endif  // FRACFLOW_PATHS_HPP
