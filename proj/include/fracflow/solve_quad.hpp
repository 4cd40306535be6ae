#ifndef FRACFLOW_SOLVE_QUAD_HPP
#define FRACFLOW_SOLVE_QUAD_HPP

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "fracflow/quadrature.hpp"
#include "fracflow/solution.hpp"
#include "fracflow/stable.hpp"

namespace fracflow {

struct QuadSolveOptions {
  double inner_tol = 1e-10;  // improper s-integrals
  double outer_tol = 1e-9;   // r/y integrals
};

// Int_0^inf e^{-lambda s} mu_a^t(s) ds against the exit-time density; equals
// E_beta(-lambda (t-a)^beta) analytically.
double laplace_exit_quad(double beta, double lambda, double t, double a,
                         const QuadSolveOptions& opt = {});

// Discounted-source operator evaluated through the transition density:
//   M g(t) = Int_0^{t-a} g(t-r) r^{beta-1} K(lambda r^beta) dr,
//   K(u)   = Int_0^inf e^{-u s} s^{-1/beta} w_beta(s^{-1/beta}) ds.
// A fixed (beta, lambda, interval) engine caches K on a Chebyshev proxy so a
// whole curve reuses it.
class MOperatorQuad {
 public:
  MOperatorQuad(double beta, double lambda, double a, double b,
                const QuadSolveOptions& opt = {});

  double apply(const std::function<double(double)>& g, double t,
               const std::vector<double>& g_breakpoints = {}) const;

  double kernel_value(double u) const;  // K(u)
  double beta() const { return beta_; }

 private:
  double kernel_value_direct(double u) const;

  double beta_, lambda_, a_;
  QuadSolveOptions opt_;
  CachedStableDensity density_;
  std::optional<ChebyshevFit> kfit_;
  double k0_ = 0.0;  // K at u = 0 (covers lambda = 0)
};

// One-shot form of the above.
double m_operator_quad(double beta, double lambda,
                       const std::function<double(double)>& g, double a,
                       double t, const QuadSolveOptions& opt = {},
                       const std::vector<double>& g_breakpoints = {});

SolutionCurve solve_rl_quad(double beta, double lambda,
                            const std::function<double(double)>& g, double a,
                            const std::vector<double>& grid,
                            const std::vector<double>& g_breakpoints = {},
                            const QuadSolveOptions& opt = {});

SolutionCurve solve_caputo_quad(double beta, double lambda,
                                const std::function<double(double)>& g,
                                double u_a, double a,
                                const std::vector<double>& grid,
                                const std::vector<double>& g_breakpoints = {},
                                const QuadSolveOptions& opt = {});

// Mittag-Leffler closed form; the independent oracle for the other engines.
// Accepts lambda of any sign (the probabilistic engines require >= 0).
SolutionCurve solve_caputo_closed_form(
    double beta, double lambda, const std::function<double(double)>& g,
    double u_a, double a, const std::vector<double>& grid,
    const std::vector<double>& g_breakpoints = {});

struct MixedQuadOptions {
  double inner_tol = 1e-8;
  double middle_tol = 1e-7;
  double outer_tol = 1e-6;
};

// Two-term density formula for the mixed problem on [0,b1] x [0,b2]:
// killed coordinate order beta1, stopped coordinate order beta2. Boundary
// rows (t1 = 0 or t2 = 0) are emitted exactly, not integrated.
SolutionCurve solve_mixed_quad(
    double beta1, double beta2, double lambda,
    const std::function<double(double, double)>& g,
    const std::function<double(double)>& phi,
    const std::vector<std::array<double, 2>>& grid2d,
    const MixedQuadOptions& opt = {});

}  // namespace fracflow

#endif  // FRACFLOW_SOLVE_QUAD_HPP
