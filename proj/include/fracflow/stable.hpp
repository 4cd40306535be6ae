#ifndef FRACFLOW_STABLE_HPP
#define FRACFLOW_STABLE_HPP

#include <optional>
#include <stdexcept>

#include "fracflow/quadrature.hpp"
#include "fracflow/rng.hpp"

namespace fracflow {

// Stability index of a totally skewed positive stable law, pinned to the
// convention E[exp(-lambda W)] = exp(-lambda^beta).
class StableParams {
 public:
  explicit StableParams(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !(beta < 1.0))
      throw std::domain_error(
          "StableParams: stability index must lie strictly in (0,1)");
  }
  double beta() const { return beta_; }

 private:
  double beta_;
};

struct StableEval {
  double value = 0.0;
  bool accuracy_warning = false;
};

// Density w_beta(x;1,1). Zero for x <= 0. Relative accuracy ~1e-10 on
// x in [1e-3, 1e3]; underflows to 0 deep in the left tail.
double stable_density(const StableParams& p, double x);
StableEval stable_density_ex(const StableParams& p, double x);

// P[W <= x]; 0 for x <= 0, monotone, -> 1 as x -> infinity.
double stable_cdf(const StableParams& p, double x);

// Signed residual of the Mittag-Leffler / stable-density identity
//   beta E_beta(-u) - Int_0^inf exp(-u y) y^{-1-1/beta} w_beta(y^{-1/beta}) dy.
// A joint self-test of both special-function stacks; throws QuadratureError
// if the quadrature fails rather than reporting a spurious zero.
double check_ml_stable_identity(double beta, double u);

// One draw of W_beta(ds^{1/beta}, 1), i.e. a subordinator increment over a
// time step ds, via the angular-representation sampler. Rejection-free.
double sample_stable_increment(double beta, double ds, PathRng& rng);

// Chebyshev-accelerated density evaluator for one fixed order; built once
// and then ~100x faster than the direct route at ~1e-10 relative accuracy.
// The quadrature engines use this; the plain stable_density stays direct.
class CachedStableDensity {
 public:
  explicit CachedStableDensity(double beta);
  double operator()(double x) const;
  double beta() const { return beta_; }

 private:
  double beta_;
  double x_lo_, x_switch_;
  std::optional<ChebyshevFit> mid_;   // ln w against ln x on [x_lo, switch]
  std::optional<ChebyshevFit> tail_;  // series factor against q = x^-beta
};

namespace detail {

// ln U_beta(phi) for phi in (0,pi): the angular function shared by the
// integral representation of the density and the increment sampler.
double zolotarev_log_angular(double beta, double phi);

double stable_density_series(double beta, double x, bool& ok);
double stable_density_integral(double beta, double x, bool& warn);
double stable_cdf_series_upper(double beta, double x, bool& ok);  // 1 - F
double stable_cdf_integral(double beta, double x, bool& warn);

// Switch to the convergent tail series once x^beta >= 2.
double stable_series_switch(double beta);

// Standard draw (scale 1): the general angular sampler.
double kanter_standard_stable(double beta, PathRng& rng);

}  // namespace detail

}  // namespace fracflow

#endif  // FRACFLOW_STABLE_HPP
