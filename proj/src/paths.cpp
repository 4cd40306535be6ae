#include "fracflow/paths.hpp"

#include <cmath>
#include <stdexcept>

#include "fracflow/stable.hpp"

namespace fracflow {

namespace {

// one thinning step at frozen state `cur`: Poisson number of large jumps at
// the kernel's own tail rate, sizes from the envelope accepted at nu/env,
// plus the small-jump drift compensation
double thinning_increment(const JumpKernel& k, double cur, double ds,
                          double eps, PathRng& rng) {
  double inc = k.small_moment(cur, eps) * ds;
  const double rate = k.tail_mass(cur, eps);
  if (rate > 0.0) {
    const unsigned n = rng.next_poisson(rate * ds);
    for (unsigned j = 0; j < n; ++j) {
      for (int it = 0;; ++it) {
        if (it >= 100000)
          throw std::runtime_error(
              "simulate_path: envelope rejection loop failed to accept; "
              "envelope too loose for kernel '" +
              k.label + "'");
        const double r = k.envelope->sample_tail(eps, rng);
        const double env = k.envelope->value(r);
        if (env <= 0.0) continue;
        if (rng.next_double() * env <= k.nu(cur, r)) {
          inc += r;
          break;
        }
      }
    }
  }
  return inc;
}

}  // namespace

PathSample simulate_path(const JumpKernel& k, double t0, double a,
                         const SimOptions& opt, PathRng& rng) {
  if (t0 < a) throw std::domain_error("simulate_path: t0 below the barrier");
  if (!(opt.ds > 0.0)) throw std::domain_error("simulate_path: ds must be > 0");
  if (!(opt.horizon > 0.0))
    throw std::domain_error("simulate_path: horizon must be > 0");

  PathSample out;
  if (opt.record) {
    out.times.push_back(0.0);
    out.states.push_back(t0);
  }
  if (t0 == a) {
    out.exited = true;
    return out;
  }

  const bool exact_stable = k.stable_order.has_value();
  double step_scale = 0.0;  // ds^{1/beta} for the exact route
  double beta = 0.0;
  if (exact_stable) {
    beta = *k.stable_order;
    step_scale = std::pow(opt.ds, 1.0 / beta);
  } else if (!k.envelope || !k.small_moment) {
    throw std::invalid_argument(
        "simulate_path: general kernels need an envelope and small_moment");
  }

  const bool discounted = opt.lambda > 0.0;
  const double step_factor = discounted ? std::exp(-opt.lambda * opt.ds) : 1.0;
  // exact per-step discount weight: Int_{s_k}^{s_k+ds} e^{-lambda s} ds
  const double d0 =
      discounted ? (1.0 - step_factor) / opt.lambda : opt.ds;
  double ef = 1.0;  // e^{-lambda * s_k}
  double cur = t0;
  double clock = 0.0;

  while (true) {
    if (opt.query_time >= clock && opt.query_time < clock + opt.ds)
      out.state_at_query = cur;

    if (opt.g) out.functional += opt.g(cur) * ef * d0;

    double inc;
    if (exact_stable) {
      double w;
      if (beta == 0.5) {
        const double zn = rng.next_normal();
        w = 0.5 / (zn * zn);
      } else {
        w = detail::kanter_standard_stable(beta, rng);
      }
      inc = step_scale * w;
    } else {
      inc = thinning_increment(k, cur, opt.ds, opt.eps_cut, rng);
    }

    cur -= inc;
    clock += opt.ds;
    ef *= step_factor;

    if (cur <= a) {
      out.exited = true;
      out.exit_time = clock;
      out.exit_discount = discounted ? ef : 1.0;
      if (opt.record) {
        if (opt.mode == PathMode::stopped) {
          out.times.push_back(clock);
          out.states.push_back(a);
        }
        // killed paths end without a landing state
      }
      return out;
    }
    if (opt.record) {
      out.times.push_back(clock);
      out.states.push_back(cur);
    }
    if (clock >= opt.horizon) {
      out.exited = false;
      out.exit_time = clock;
      out.exit_discount = discounted ? ef : 1.0;
      return out;
    }
  }
}

double sample_exit_time_stable_exact(double beta, double t, double a,
                                     PathRng& rng) {
  if (t < a)
    throw std::domain_error("sample_exit_time_stable_exact: t below barrier");
  if (t == a) return 0.0;
  const double w = sample_stable_increment(beta, 1.0, rng);
  return std::pow((t - a) / w, beta);
}

double exit_time_density_stable(double beta, double t, double a, double s) {
  if (!(s > 0.0) || !(t > a)) return 0.0;
  const StableParams p(beta);
  const double arg = (t - a) * std::pow(s, -1.0 / beta);
  const double w = stable_density(p, arg);
  if (w == 0.0) return 0.0;
  return (t - a) / beta * std::pow(s, -1.0 / beta - 1.0) * w;
}

double joint_density_stable(double beta, double t, double a, double s,
                            double r, double xi) {
  if (!(s < xi) || s < 0.0) return 0.0;
  if (!(r >= a) || !(r < t)) return 0.0;
  if (s == 0.0) return 0.0;  // the time-s marginal is degenerate at r = t
  const StableParams p(beta);
  const double sp = std::pow(s, -1.0 / beta);
  const double transition = sp * stable_density(p, sp * (t - r));
  if (transition == 0.0) return 0.0;
  return transition * exit_time_density_stable(beta, r, a, xi - s);
}

}  // namespace fracflow
