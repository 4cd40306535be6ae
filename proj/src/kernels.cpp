#include "fracflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "fracflow/special.hpp"

namespace fracflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_order(double beta, const char* who) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::domain_error(std::string(who) +
                            ": order must lie strictly in (0,1)");
}

// coefficient of the constant-order intensity: beta / Gamma(1-beta)
double stable_coef(double beta) { return beta * inv_gamma(1.0 - beta); }

// max of beta/Gamma(1-beta) over [lo, hi], by scan (smooth, one interior max)
double stable_coef_max(double lo, double hi) {
  double m = 0.0;
  const int n = 512;
  for (int i = 0; i <= n; ++i) {
    const double b = lo + (hi - lo) * i / n;
    m = std::max(m, stable_coef(b));
  }
  return m;
}

std::vector<double> probe_grid(Interval iv, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = iv.a + (iv.b - iv.a) * i / static_cast<double>(n - 1);
  return g;
}

}  // namespace

PowerLawEnvelope::PowerLawEnvelope(std::vector<EnvelopeComponent> comps)
    : comps_(std::move(comps)) {
  if (comps_.empty())
    throw std::invalid_argument("PowerLawEnvelope: no components");
  for (const auto& c : comps_) {
    if (!(c.coef >= 0.0) || !(c.beta > 0.0) || !(c.beta < 1.0))
      throw std::invalid_argument("PowerLawEnvelope: bad component");
  }
}

double PowerLawEnvelope::value(double r) const {
  if (!(r > 0.0)) return 0.0;
  double v = 0.0;
  for (const auto& c : comps_)
    if (r >= c.r_lo && r < c.r_hi) v += c.coef * std::pow(r, -1.0 - c.beta);
  return v;
}

double PowerLawEnvelope::tail(double eps) const {
  double v = 0.0;
  for (const auto& c : comps_) {
    const double lo = std::max(eps, c.r_lo);
    if (lo >= c.r_hi) continue;
    const double upper =
        std::isinf(c.r_hi) ? 0.0 : std::pow(c.r_hi, -c.beta);
    v += c.coef / c.beta * (std::pow(lo, -c.beta) - upper);
  }
  return v;
}

double PowerLawEnvelope::sample_tail(double eps, PathRng& rng) const {
  // pick a component proportionally to its restricted mass, then invert
  const std::size_t n = comps_.size();
  std::vector<double> masses(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = comps_[i];
    const double lo = std::max(eps, c.r_lo);
    double m = 0.0;
    if (lo < c.r_hi) {
      const double upper =
          std::isinf(c.r_hi) ? 0.0 : std::pow(c.r_hi, -c.beta);
      m = c.coef / c.beta * (std::pow(lo, -c.beta) - upper);
    }
    total += m;
    masses[i] = total;
  }
  if (total <= 0.0)
    throw std::runtime_error("PowerLawEnvelope: empty tail at this eps");
  const double pick = rng.next_double() * total;
  std::size_t idx = 0;
  while (idx + 1 < n && masses[idx] < pick) ++idx;
  const auto& c = comps_[idx];
  const double lo = std::max(eps, c.r_lo);
  const double plo = std::pow(lo, -c.beta);
  const double phi = std::isinf(c.r_hi) ? 0.0 : std::pow(c.r_hi, -c.beta);
  const double u = rng.next_double();
  return std::pow(plo - u * (plo - phi), -1.0 / c.beta);
}

JumpKernel kernel_stable(double beta) {
  require_order(beta, "kernel_stable");
  const double g = stable_coef(beta);
  JumpKernel k;
  k.nu = [g, beta](double, double r) {
    return r > 0.0 ? g * std::pow(r, -1.0 - beta) : 0.0;
  };
  k.tail_mass = [g, beta](double, double x) {
    return (g / beta) * std::pow(x, -beta);
  };
  k.small_moment = [g, beta](double, double eps) {
    return g * std::pow(eps, 1.0 - beta) / (1.0 - beta);
  };
  k.envelope = PowerLawEnvelope({{g, beta, 0.0, kInf}});
  k.stable_order = beta;
  k.label = "stable(beta=" + std::to_string(beta) + ")";
  return k;
}

JumpKernel kernel_multi_term(std::vector<std::function<double(double)>> weights,
                             std::vector<double> betas, Interval working) {
  if (weights.empty() || weights.size() != betas.size())
    throw std::invalid_argument(
        "kernel_multi_term: weights and orders must be nonempty and matched");
  for (double b : betas) require_order(b, "kernel_multi_term");

  const auto grid = probe_grid(working, 201);
  std::vector<double> coef(betas.size()), sup_w(betas.size(), 0.0);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    coef[i] = stable_coef(betas[i]);
    for (double t : grid) {
      const double w = weights[i](t);
      if (w < 0.0)
        throw std::domain_error(
            "kernel_multi_term: negative weight at a probe point");
      sup_w[i] = std::max(sup_w[i], w);
    }
  }

  auto ws = std::make_shared<std::vector<std::function<double(double)>>>(
      std::move(weights));
  auto bs = std::make_shared<std::vector<double>>(std::move(betas));
  auto cs = std::make_shared<std::vector<double>>(std::move(coef));

  JumpKernel k;
  k.nu = [ws, bs, cs](double t, double r) {
    if (!(r > 0.0)) return 0.0;
    double v = 0.0;
    for (std::size_t i = 0; i < bs->size(); ++i)
      v += (*ws)[i](t) * (*cs)[i] * std::pow(r, -1.0 - (*bs)[i]);
    return v;
  };
  k.tail_mass = [ws, bs, cs](double t, double x) {
    double v = 0.0;
    for (std::size_t i = 0; i < bs->size(); ++i)
      v += (*ws)[i](t) * (*cs)[i] / (*bs)[i] * std::pow(x, -(*bs)[i]);
    return v;
  };
  k.small_moment = [ws, bs, cs](double t, double eps) {
    double v = 0.0;
    for (std::size_t i = 0; i < bs->size(); ++i)
      v += (*ws)[i](t) * (*cs)[i] * std::pow(eps, 1.0 - (*bs)[i]) /
           (1.0 - (*bs)[i]);
    return v;
  };
  std::vector<EnvelopeComponent> comps;
  for (std::size_t i = 0; i < bs->size(); ++i)
    comps.push_back({1.02 * sup_w[i] * (*cs)[i], (*bs)[i], 0.0, kInf});
  k.envelope = PowerLawEnvelope(std::move(comps));
  k.working = working;
  k.label = "multi_term(" + std::to_string(bs->size()) + " terms)";
  return k;
}

JumpKernel kernel_variable_order(std::function<double(double)> beta_fn,
                                 double beta_lo, double beta_hi,
                                 Interval working,
                                 std::function<double(double)> beta_fn_deriv) {
  require_order(beta_lo, "kernel_variable_order");
  require_order(beta_hi, "kernel_variable_order");
  if (beta_lo > beta_hi)
    throw std::invalid_argument("kernel_variable_order: beta_lo > beta_hi");
  for (double t : probe_grid(working, 201)) {
    const double b = beta_fn(t);
    if (b < beta_lo - 1e-9 || b > beta_hi + 1e-9)
      throw std::domain_error(
          "kernel_variable_order: order leaves the declared compact range");
  }

  auto order_at = [beta_fn, beta_lo, beta_hi](double t) {
    const double b = beta_fn(t);
    if (b < beta_lo - 1e-9 || b > beta_hi + 1e-9)
      throw std::domain_error(
          "kernel_variable_order: order leaves the declared compact range");
    return std::clamp(b, beta_lo, beta_hi);
  };

  JumpKernel k;
  k.nu = [order_at](double t, double r) {
    if (!(r > 0.0)) return 0.0;
    const double b = order_at(t);
    return stable_coef(b) * std::pow(r, -1.0 - b);
  };
  k.tail_mass = [order_at](double t, double x) {
    const double b = order_at(t);
    return inv_gamma(1.0 - b) * std::pow(x, -b);
  };
  k.small_moment = [order_at](double t, double eps) {
    const double b = order_at(t);
    return stable_coef(b) * std::pow(eps, 1.0 - b) / (1.0 - b);
  };
  // For r < 1 the steepest admissible exponent dominates, for r >= 1 the
  // flattest; the coefficient max over the whole range bounds both.
  const double gmax = 1.005 * stable_coef_max(beta_lo, beta_hi);
  k.envelope = PowerLawEnvelope(
      {{gmax, beta_hi, 0.0, 1.0}, {gmax, beta_lo, 1.0, kInf}});
  k.working = working;
  k.label = "variable_order(beta in [" + std::to_string(beta_lo) + "," +
            std::to_string(beta_hi) + "])";
  (void)beta_fn_deriv;  // reserved for analytic dt probes; FD probing is used
  return k;
}

JumpKernel kernel_distributed(std::function<double(double, double)> weight,
                              std::function<double(double, double)> order,
                              std::vector<DistributedNode> nodes,
                              Interval working) {
  if (nodes.empty())
    throw std::invalid_argument("kernel_distributed: no quadrature nodes");
  const auto grid = probe_grid(working, 201);
  std::vector<double> lo(nodes.size(), 1.0), hi(nodes.size(), 0.0),
      sup_mw(nodes.size(), 0.0);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (!std::isfinite(nodes[j].m) || nodes[j].m < 0.0)
      throw std::invalid_argument("kernel_distributed: bad node weight");
    for (double t : grid) {
      const double b = order(nodes[j].s, t);
      if (!(b > 0.0) || !(b < 1.0))
        throw std::domain_error(
            "kernel_distributed: node order outside (0,1)");
      lo[j] = std::min(lo[j], b);
      hi[j] = std::max(hi[j], b);
      const double w = weight(nodes[j].s, t);
      if (w < 0.0)
        throw std::domain_error(
            "kernel_distributed: negative weight at a probe point");
      sup_mw[j] = std::max(sup_mw[j], nodes[j].m * w);
    }
  }

  auto nd = std::make_shared<std::vector<DistributedNode>>(std::move(nodes));
  auto wfn = std::make_shared<std::function<double(double, double)>>(
      std::move(weight));
  auto ofn = std::make_shared<std::function<double(double, double)>>(
      std::move(order));

  JumpKernel k;
  k.nu = [nd, wfn, ofn](double t, double r) {
    if (!(r > 0.0)) return 0.0;
    double v = 0.0;
    for (const auto& n : *nd) {
      const double b = (*ofn)(n.s, t);
      v += n.m * (*wfn)(n.s, t) * stable_coef(b) * std::pow(r, -1.0 - b);
    }
    return v;
  };
  k.tail_mass = [nd, wfn, ofn](double t, double x) {
    double v = 0.0;
    for (const auto& n : *nd) {
      const double b = (*ofn)(n.s, t);
      v += n.m * (*wfn)(n.s, t) * inv_gamma(1.0 - b) * std::pow(x, -b);
    }
    return v;
  };
  k.small_moment = [nd, wfn, ofn](double t, double eps) {
    double v = 0.0;
    for (const auto& n : *nd) {
      const double b = (*ofn)(n.s, t);
      v += n.m * (*wfn)(n.s, t) * stable_coef(b) *
           std::pow(eps, 1.0 - b) / (1.0 - b);
    }
    return v;
  };
  // one merged two-piece bound: each node's intensity is dominated by its
  // range maximum, and r-powers by the extreme exponents
  double lo_all = 1.0, hi_all = 0.0, coef_all = 0.0;
  for (std::size_t j = 0; j < nd->size(); ++j) {
    const double pad = 0.002 * (hi[j] - lo[j]) + 1e-6;
    const double l = std::max(1e-6, lo[j] - pad);
    const double h = std::min(1.0 - 1e-9, hi[j] + pad);
    coef_all += 1.02 * sup_mw[j] * stable_coef_max(l, h);
    lo_all = std::min(lo_all, l);
    hi_all = std::max(hi_all, h);
  }
  if (coef_all <= 0.0) {
    lo_all = hi_all = 0.5;
  }
  k.envelope = PowerLawEnvelope(
      {{coef_all, hi_all, 0.0, 1.0}, {coef_all, lo_all, 1.0, kInf}});
  k.working = working;
  k.label = "distributed(" + std::to_string(nd->size()) + " nodes)";
  return k;
}

namespace detail {

double generator_integral(const JumpKernel& k,
                          const std::function<double(double)>& h, double a,
                          double t, const OperatorQuadOptions& opt) {
  const double span = t - a;
  const double ht = h(t);

  // Below r_lin the sampled difference h(t-r) - h(t) is dominated by
  // rounding noise, so that part is handled analytically through the first
  // moment: Int_0^{r_lin} (h(t-r)-h(t)) nu dr ~= -h'(t) small_moment(t,r_lin).
  // The neglected curvature term is O(r_lin^{2-beta}).
  const double r_lin = 1e-7 * span;
  const double e = 6e-6 * std::max(1.0, std::fabs(t));
  // one-sided second-order difference, written so constant h gives exactly 0
  const double d1 = h(t - e) - ht;
  const double d2 = h(t - 2.0 * e) - ht;
  const double hprime = (d2 - 4.0 * d1) / (2.0 * e);
  double small_part;
  QuadOptions qopt;
  qopt.abs_tol = opt.abs_tol / 16.0;
  qopt.rel_tol = opt.rel_tol;
  if (k.small_moment) {
    small_part = -hprime * k.small_moment(t, r_lin);
  } else {
    double m = 0.0;
    double u_top = std::log(r_lin);
    for (int blk = 0; blk < 120; ++blk) {
      auto r = integrate(
          [&](double u) {
            const double rr = std::exp(u);
            return k.nu(t, rr) * rr * rr;
          },
          u_top - 3.0, u_top, qopt);
      m += r.value;
      u_top -= 3.0;
      if (std::fabs(r.value) <= 1e-3 * (opt.abs_tol + std::fabs(m))) break;
    }
    small_part = -hprime * m;
  }

  auto f = [&](double u) {
    const double r = std::exp(u);
    return (h(t - r) - ht) * k.nu(t, r) * r;
  };
  const double u_hi = std::log(span);
  const double u_lo = std::log(r_lin);
  const double block_w = 3.0;
  double acc = 0.0;
  double hi = u_hi;
  while (hi > u_lo) {
    const double lo = std::max(u_lo, hi - block_w);
    auto r = integrate(f, lo, hi, qopt);
    if (!r.converged)
      throw QuadratureError(
          "operator quadrature did not converge near r ~ exp(" +
              std::to_string(hi) + ")",
          r.error);
    acc += r.value;
    hi = lo;
  }
  return acc + small_part;
}

}  // namespace detail

double apply_caputo_operator(const JumpKernel& k,
                             const std::function<double(double)>& h, double a,
                             double t, const OperatorQuadOptions& opt) {
  if (!(t > a)) throw std::domain_error("apply_caputo_operator: t must be > a");
  const double integral = detail::generator_integral(k, h, a, t, opt);
  return integral + (h(a) - h(t)) * k.tail_mass(t, t - a);
}

double apply_rl_operator(const JumpKernel& k,
                         const std::function<double(double)>& h, double a,
                         double t, const OperatorQuadOptions& opt) {
  if (!(t > a)) throw std::domain_error("apply_rl_operator: t must be > a");
  const double integral = detail::generator_integral(k, h, a, t, opt);
  return integral - h(t) * k.tail_mass(t, t - a);
}

KernelHypothesisReport validate_hypotheses(const JumpKernel& k,
                                           Interval t_range,
                                           const HypothesisProbeConfig& cfg) {
  KernelHypothesisReport rep;
  const double len = t_range.length();
  const double r_max = cfg.r_window_factor * len;
  const auto grid = probe_grid(t_range, cfg.t_probes);

  QuadOptions qopt;
  qopt.abs_tol = 1e-10;
  qopt.rel_tol = 1e-8;

  // Int_0^{r_upper} r nu dr via r = e^u, marching down from ln(r_upper)
  auto moment_at = [&](auto&& nu_t, double r_upper, bool& converged) {
    const double u_hi = std::log(r_upper);
    double acc = 0.0;
    int quiet = 0;
    converged = true;
    for (int blk = 0; blk < 120; ++blk) {
      const double hi = u_hi - 3.0 * blk;
      auto r = integrate(
          [&](double u) {
            const double rr = std::exp(u);
            return nu_t(rr) * rr * rr;
          },
          hi - 3.0, hi, qopt);
      if (!r.converged) converged = false;
      acc += r.value;
      quiet = (std::fabs(r.value) <= 1e-12 * (1.0 + std::fabs(acc))) ? quiet + 1
                                                                     : 0;
      if (quiet >= 2) break;
    }
    return acc;
  };

  bool all_conv = true;
  for (double t : grid) {
    bool conv = true;
    const double m =
        moment_at([&](double r) { return k.nu(t, r); }, r_max, conv);
    rep.sup_first_moment = std::max(rep.sup_first_moment, m);
    if (!conv) {
      all_conv = false;
      rep.notes.push_back("first-moment quadrature not converged at t=" +
                          std::to_string(t));
    }
  }
  rep.first_moment_ok = all_conv && std::isfinite(rep.sup_first_moment) &&
                        rep.sup_first_moment < cfg.moment_cap;

  // t-derivative clause by central differences
  const double dt = 1e-4 * len;
  bool dt_conv = true;
  for (double t : grid) {
    const double t_minus = std::max(t_range.a, t - dt);
    const double t_plus = std::min(t_range.b, t + dt);
    const double denom = t_plus - t_minus;
    if (denom <= 0.0) continue;
    bool conv = true;
    const double m = moment_at(
        [&](double r) {
          return std::fabs(k.nu(t_plus, r) - k.nu(t_minus, r)) / denom;
        },
        r_max, conv);
    rep.sup_dt_first_moment = std::max(rep.sup_dt_first_moment, m);
    if (!conv) dt_conv = false;
  }
  rep.dt_moment_ok = dt_conv && std::isfinite(rep.sup_dt_first_moment) &&
                     rep.sup_dt_first_moment < cfg.moment_cap;

  // small-jump clause on a shrinking delta ladder
  std::vector<double> deltas{0.1 * len, 0.01 * len, 1e-3 * len, 1e-4 * len};
  std::vector<double> values;
  for (double d : deltas) {
    double sup = 0.0;
    for (double t : grid) {
      double v;
      if (k.small_moment) {
        v = k.small_moment(t, d);
      } else {
        bool conv = true;
        v = moment_at([&](double r) { return k.nu(t, r); }, d, conv);
        if (!conv) rep.notes.push_back("small-jump probe not converged");
      }
      sup = std::max(sup, v);
    }
    values.push_back(sup);
  }
  rep.small_jump_limit = values.back();
  // log-log slope across the ladder; positive slope means the moment vanishes
  double slope = 0.0;
  bool decreasing = true;
  int used = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] * (1.0 + 1e-12)) decreasing = false;
    if (values[i] > 0.0 && values[i - 1] > 0.0) {
      slope += std::log(values[i - 1] / values[i]) /
               std::log(deltas[i - 1] / deltas[i]);
      ++used;
    }
  }
  if (used > 0) slope /= used;
  rep.small_jump_ok =
      (values.back() == 0.0) || (decreasing && slope > cfg.small_jump_slope_min);

  // intensity floor near r = 0
  const double eps = cfg.h1_eps_frac * len;
  double floor_v = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    for (double frac : {1.0, 0.75, 0.5, 0.25, 0.1, 0.01}) {
      floor_v = std::min(floor_v, k.nu(t, frac * eps));
    }
  }
  rep.intensity_floor = std::isfinite(floor_v) ? floor_v : 0.0;
  rep.intensity_floor_ok = rep.intensity_floor > 1e-12;

  return rep;
}

}  // namespace fracflow
