#include "fracflow/solve_quad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracflow/paths.hpp"
#include "fracflow/special.hpp"
#include "fracflow/stable.hpp"

namespace fracflow {

namespace {

// adds breakpoints (already mapped into the integration variable) to [0, hi]
std::vector<double> with_breaks(double hi, const std::vector<double>& breaks) {
  std::vector<double> pts{0.0};
  for (double p : breaks)
    if (p > 1e-14 && p < hi * (1.0 - 1e-14)) pts.push_back(p);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

double laplace_exit_quad(double beta, double lambda, double t, double a,
                         const QuadSolveOptions& opt) {
  if (!(t > a)) throw std::domain_error("laplace_exit_quad: t must be > a");
  if (lambda < 0.0)
    throw std::domain_error("laplace_exit_quad: lambda must be >= 0");
  // s = v/(1-v) maps (0,inf) to (0,1)
  auto f = [&](double v) {
    const double s = v / (1.0 - v);
    const double mu = exit_time_density_stable(beta, t, a, s);
    if (mu == 0.0) return 0.0;
    const double jac = 1.0 / ((1.0 - v) * (1.0 - v));
    return std::exp(-lambda * s) * mu * jac;
  };
  QuadOptions q;
  q.abs_tol = opt.inner_tol;
  q.rel_tol = opt.inner_tol;
  q.max_intervals = 20000;
  auto r = integrate(f, 0.0, 1.0, q);
  return require_converged(r, "laplace_exit_quad");
}

MOperatorQuad::MOperatorQuad(double beta, double lambda, double a, double b,
                             const QuadSolveOptions& opt)
    : beta_(beta), lambda_(lambda), a_(a), opt_(opt), density_(beta) {
  if (lambda < 0.0)
    throw std::domain_error("MOperatorQuad: lambda must be >= 0");
  if (!(b > a)) throw std::domain_error("MOperatorQuad: empty interval");
  k0_ = kernel_value_direct(0.0);
  if (lambda_ > 0.0) {
    const double u_hi = lambda_ * std::pow(b - a, beta_);
    kfit_.emplace([this](double u) { return kernel_value_direct(u); }, 0.0,
                  u_hi, 1e-12, 513);
    if (!kfit_->converged())
      throw QuadratureError(
          "MOperatorQuad: kernel proxy did not reach tolerance", 0.0);
  }
}

double MOperatorQuad::kernel_value_direct(double u) const {
  auto f = [&](double v) {
    const double s = v / (1.0 - v);
    const double x = std::pow(s, -1.0 / beta_);
    const double w = density_(x);
    if (w == 0.0) return 0.0;
    const double jac = 1.0 / ((1.0 - v) * (1.0 - v));
    return std::exp(-u * s) * x * w * jac;
  };
  QuadOptions q;
  q.abs_tol = opt_.inner_tol;
  q.rel_tol = opt_.inner_tol;
  q.max_intervals = 20000;
  auto r = integrate(f, 0.0, 1.0, q);
  return require_converged(r, "MOperatorQuad::kernel_value");
}

double MOperatorQuad::kernel_value(double u) const {
  if (u == 0.0) return k0_;
  if (kfit_ && u >= kfit_->lo() && u <= kfit_->hi()) return (*kfit_)(u);
  return kernel_value_direct(u);
}

double MOperatorQuad::apply(const std::function<double(double)>& g, double t,
                            const std::vector<double>& g_breakpoints) const {
  if (t == a_) return 0.0;
  if (!(t > a_)) throw std::domain_error("MOperatorQuad: t must be >= a");
  // M g(t) = (1/beta) Int_0^{(t-a)^beta} g(t - y^{1/beta}) K(lambda y) dy
  const double y_hi = std::pow(t - a_, beta_);
  std::vector<double> breaks;
  for (double c : g_breakpoints)
    if (c > a_ && c < t) breaks.push_back(std::pow(t - c, beta_));
  auto pts = with_breaks(y_hi, breaks);
  auto f = [&](double y) {
    return g(t - std::pow(y, 1.0 / beta_)) * kernel_value(lambda_ * y);
  };
  QuadOptions q;
  q.abs_tol = opt_.outer_tol;
  q.rel_tol = opt_.outer_tol;
  q.max_intervals = 20000;
  auto r = integrate_split(f, pts, q);
  return require_converged(r, "m_operator_quad") / beta_;
}

double m_operator_quad(double beta, double lambda,
                       const std::function<double(double)>& g, double a,
                       double t, const QuadSolveOptions& opt,
                       const std::vector<double>& g_breakpoints) {
  MOperatorQuad engine(beta, lambda, a, std::max(t, a + 1e-12), opt);
  return engine.apply(g, t, g_breakpoints);
}

SolutionCurve solve_rl_quad(double beta, double lambda,
                            const std::function<double(double)>& g, double a,
                            const std::vector<double>& grid,
                            const std::vector<double>& g_breakpoints,
                            const QuadSolveOptions& opt) {
  double b = a;
  for (double t : grid) b = std::max(b, t);
  MOperatorQuad engine(beta, lambda, a, std::max(b, a + 1e-12), opt);
  SolutionCurve out;
  out.method = "quad";
  for (double t : grid) {
    SolutionPoint pt;
    pt.t1 = t;
    pt.value = (t == a) ? 0.0 : engine.apply(g, t, g_breakpoints);
    out.points.push_back(pt);
  }
  return out;
}

SolutionCurve solve_caputo_quad(double beta, double lambda,
                                const std::function<double(double)>& g,
                                double u_a, double a,
                                const std::vector<double>& grid,
                                const std::vector<double>& g_breakpoints,
                                const QuadSolveOptions& opt) {
  double b = a;
  for (double t : grid) b = std::max(b, t);
  MOperatorQuad engine(beta, lambda, a, std::max(b, a + 1e-12), opt);
  SolutionCurve out;
  out.method = "quad";
  for (double t : grid) {
    SolutionPoint pt;
    pt.t1 = t;
    if (t == a) {
      pt.value = u_a;
    } else {
      const double survival =
          (u_a == 0.0) ? 0.0 : laplace_exit_quad(beta, lambda, t, a, opt);
      pt.value = u_a * survival + engine.apply(g, t, g_breakpoints);
    }
    out.points.push_back(pt);
  }
  return out;
}

SolutionCurve solve_caputo_closed_form(
    double beta, double lambda, const std::function<double(double)>& g,
    double u_a, double a, const std::vector<double>& grid,
    const std::vector<double>& g_breakpoints) {
  StableParams check(beta);
  (void)check;
  SolutionCurve out;
  out.method = "closed_form";
  for (double t : grid) {
    SolutionPoint pt;
    pt.t1 = t;
    if (t == a) {
      pt.value = u_a;
    } else if (t < a) {
      throw std::domain_error("solve_caputo_closed_form: t below a");
    } else {
      const double y_hi = std::pow(t - a, beta);
      std::vector<double> breaks;
      for (double c : g_breakpoints)
        if (c > a && c < t) breaks.push_back(std::pow(t - c, beta));
      auto pts = with_breaks(y_hi, breaks);
      auto f = [&](double y) {
        return g(t - std::pow(y, 1.0 / beta)) *
               mittag_leffler2(beta, beta, -lambda * y);
      };
      QuadOptions q;
      q.abs_tol = 1e-10;
      q.rel_tol = 1e-10;
      q.max_intervals = 20000;
      auto r = integrate_split(f, pts, q);
      pt.value = u_a * mittag_leffler(beta, -lambda * std::pow(t - a, beta)) +
                 require_converged(r, "solve_caputo_closed_form") / beta;
    }
    out.points.push_back(pt);
  }
  return out;
}

SolutionCurve solve_mixed_quad(
    double beta1, double beta2, double lambda,
    const std::function<double(double, double)>& g,
    const std::function<double(double)>& phi,
    const std::vector<std::array<double, 2>>& grid2d,
    const MixedQuadOptions& opt) {
  const CachedStableDensity p1(beta1), p2(beta2);
  if (lambda < 0.0)
    throw std::domain_error("solve_mixed_quad: lambda must be >= 0");
  if (phi && std::fabs(phi(0.0)) > 1e-12)
    throw std::domain_error("solve_mixed_quad: phi(0) must vanish");

  QuadOptions qi;  // innermost s-integrals
  qi.abs_tol = opt.inner_tol;
  qi.rel_tol = opt.inner_tol;
  qi.max_intervals = 20000;

  SolutionCurve out;
  out.method = "quad";
  out.two_dim = true;

  for (const auto& tt : grid2d) {
    const double t1 = tt[0], t2 = tt[1];
    SolutionPoint pt;
    pt.t1 = t1;
    pt.t2 = t2;
    if (t1 == 0.0) {
      pt.value = 0.0;
      out.points.push_back(pt);
      continue;
    }
    if (t2 == 0.0) {
      pt.value = phi ? phi(t1) : 0.0;
      out.points.push_back(pt);
      continue;
    }

    // The s-integral runs outermost (Fubini): with s fixed, each transition
    // factor p_s(r) = s^{-1/b} w(r s^{-1/b}) is a bounded-domain integrand
    // whose moving spike near r ~ s^{1/b} gets explicit breakpoints. Nesting
    // the s-integral innermost instead makes the (r1, r2) integrand a
    // diagonal ridge that adaptive bisection resolves over and over.
    auto spike_points = [](double t_hi, double scale) {
      std::vector<double> pts{0.0};
      for (double f : {0.5, 2.0, 8.0, 32.0, 128.0}) {
        const double p = f * scale;
        if (p < t_hi * (1.0 - 1e-12) && p > pts.back()) pts.push_back(p);
      }
      pts.push_back(t_hi);
      return pts;
    };

    QuadOptions q_mid;  // r1-level
    q_mid.abs_tol = opt.middle_tol;
    q_mid.rel_tol = opt.middle_tol;
    q_mid.max_intervals = 20000;
    QuadOptions q_out;  // s-level
    q_out.abs_tol = opt.outer_tol;
    q_out.rel_tol = opt.outer_tol;
    q_out.max_intervals = 20000;

    double phi_term = 0.0;
    if (phi) {
      auto s_fn = [&](double v) {
        const double s = v / (1.0 - v);
        if (s <= 0.0) return 0.0;
        const double w2 = p2(t2 * std::pow(s, -1.0 / beta2));
        if (w2 == 0.0) return 0.0;
        const double mu = t2 / beta2 * std::pow(s, -1.0 / beta2 - 1.0) * w2;
        const double sp1 = std::pow(s, -1.0 / beta1);
        auto f = [&](double r) {
          const double w1 = p1(r * sp1);
          return w1 == 0.0 ? 0.0 : phi(t1 - r) * sp1 * w1;
        };
        auto rint =
            integrate_split(f, spike_points(t1, std::pow(s, 1.0 / beta1)), qi);
        const double jac = 1.0 / ((1.0 - v) * (1.0 - v));
        return std::exp(-lambda * s) * mu *
               require_converged(rint, "solve_mixed_quad phi-term inner") *
               jac;
      };
      auto r = integrate(s_fn, 0.0, 1.0, q_out);
      phi_term = require_converged(r, "solve_mixed_quad phi-term");
    }

    double g_term = 0.0;
    if (g) {
      auto s_fn = [&](double v) {
        const double s = v / (1.0 - v);
        if (s <= 0.0) return 0.0;
        const double sp1 = std::pow(s, -1.0 / beta1);
        const double sp2 = std::pow(s, -1.0 / beta2);
        auto f1 = [&](double r1) {
          const double w1 = p1(r1 * sp1);
          if (w1 == 0.0) return 0.0;
          auto f2 = [&](double r2) {
            const double w2 = p2(r2 * sp2);
            return w2 == 0.0 ? 0.0 : g(t1 - r1, t2 - r2) * sp2 * w2;
          };
          auto r2int = integrate_split(
              f2, spike_points(t2, std::pow(s, 1.0 / beta2)), qi);
          return sp1 * w1 *
                 require_converged(r2int, "solve_mixed_quad g-term inner");
        };
        auto r1int =
            integrate_split(f1, spike_points(t1, std::pow(s, 1.0 / beta1)),
                            q_mid);
        const double jac = 1.0 / ((1.0 - v) * (1.0 - v));
        return std::exp(-lambda * s) *
               require_converged(r1int, "solve_mixed_quad g-term middle") *
               jac;
      };
      auto r = integrate(s_fn, 0.0, 1.0, q_out);
      g_term = require_converged(r, "solve_mixed_quad g-term");
    }

    pt.value = phi_term + g_term;
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace fracflow
