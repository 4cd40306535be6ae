#include "fracflow/solve_mc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fracflow/parallel.hpp"
#include "fracflow/paths.hpp"
#include "fracflow/rng.hpp"
#include "fracflow/stable.hpp"

namespace fracflow {

namespace {

constexpr std::size_t kBlock = 4096;

struct Accumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t truncated = 0;
  void add(double x, bool trunc) {
    sum += x;
    sumsq += x * x;
    if (trunc) ++truncated;
  }
};

struct PathTerms {
  double functional = 0.0;
  double exit_discount = 1.0;
  bool truncated = false;
};

McEstimate finalize(const std::vector<Accumulator>& blocks, std::size_t n) {
  Accumulator total;
  for (const auto& b : blocks) {
    total.sum += b.sum;
    total.sumsq += b.sumsq;
    total.truncated += b.truncated;
  }
  McEstimate e;
  e.n_paths = n;
  e.value = total.sum / static_cast<double>(n);
  const double var =
      std::max(0.0, total.sumsq / static_cast<double>(n) - e.value * e.value);
  e.std_error = std::sqrt(var / static_cast<double>(n > 1 ? n - 1 : 1));
  e.truncated_fraction = static_cast<double>(total.truncated) /
                         static_cast<double>(n);
  return e;
}

// One subordinator sweep serving every grid point at once (valid because a
// state-independent kernel drives all starting points with the same law).
// Terms are accumulated per grid point; `terms` has one slot per point.
void sweep_stable(const JumpKernel& k, const std::vector<double>& ts, double a,
                  const std::function<double(double)>& g, double lambda,
                  double ds, double horizon, PathRng& rng,
                  std::vector<PathTerms>& terms) {
  const double beta = *k.stable_order;
  const double step_scale = std::pow(ds, 1.0 / beta);
  const bool discounted = lambda > 0.0;
  const double step_factor = discounted ? std::exp(-lambda * ds) : 1.0;
  const double d0 = discounted ? (1.0 - step_factor) / lambda : ds;
  const std::size_t m = ts.size();

  double w = 0.0;
  double ef = 1.0;
  double clock = 0.0;
  std::size_t idx = 0;  // first still-running grid point (ts ascending)
  while (idx < m && clock < horizon) {
    if (g) {
      const double weight = ef * d0;
      for (std::size_t j = idx; j < m; ++j)
        terms[j].functional += g(ts[j] - w) * weight;
    }
    double inc;
    if (beta == 0.5) {
      const double zn = rng.next_normal();
      inc = step_scale * (0.5 / (zn * zn));
    } else {
      inc = step_scale * detail::kanter_standard_stable(beta, rng);
    }
    w += inc;
    clock += ds;
    ef *= step_factor;
    while (idx < m && ts[idx] - a <= w) {
      terms[idx].exit_discount = discounted ? ef : 1.0;
      terms[idx].truncated = false;
      ++idx;
    }
  }
  for (std::size_t j = idx; j < m; ++j) {
    terms[j].exit_discount = discounted ? ef : 1.0;
    terms[j].truncated = true;
  }
}

SolutionCurve solve_linear_mc(const ProblemSpec& spec,
                              const std::vector<double>& grid,
                              const McConfig& cfg, bool caputo) {
  if (spec.lambda < 0.0)
    throw std::domain_error("solve_mc: lambda must be >= 0");
  const double u_a = caputo ? spec.u_a : 0.0;
  SolutionCurve out;
  out.method = "mc";

  const double horizon =
      cfg.horizon_override > 0.0
          ? cfg.horizon_override
          : horizon_policy(spec.kernel, spec.lambda, spec.a, spec.b,
                           &out.warnings);

  // sorted view of the interior points; boundary rows are exact
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return grid[i] < grid[j]; });
  std::vector<double> ts;
  std::vector<std::size_t> slot;  // curve index per interior point
  out.points.resize(grid.size());
  for (std::size_t i : order) {
    const double t = grid[i];
    if (t < spec.a || t > spec.b + 1e-12)
      throw std::domain_error("solve_mc: grid point outside [a, b]");
    out.points[i].t1 = t;
    if (t == spec.a) {
      out.points[i].value = caputo ? u_a : 0.0;
      out.points[i].n_paths = cfg.n_paths;
    } else {
      ts.push_back(t);
      slot.push_back(i);
    }
  }
  if (ts.empty()) return out;

  const std::size_t m = ts.size();
  const std::size_t n_blocks = (cfg.n_paths + kBlock - 1) / kBlock;
  std::vector<std::vector<Accumulator>> acc(n_blocks,
                                            std::vector<Accumulator>(m));

  const bool shared_sweep = spec.kernel.stable_order.has_value();
  const double eps_cut = cfg.eps_cut_frac * (spec.b - spec.a);

  parallel_for_blocks(n_blocks, cfg.workers, [&](std::size_t blk) {
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = std::min(cfg.n_paths, lo + kBlock);
    std::vector<PathTerms> terms(m);
    for (std::size_t path = lo; path < hi; ++path) {
      if (shared_sweep) {
        std::fill(terms.begin(), terms.end(), PathTerms{});
        PathRng rng(cfg.master_seed, path);
        sweep_stable(spec.kernel, ts, spec.a, spec.g, spec.lambda, cfg.ds,
                     horizon, rng, terms);
        for (std::size_t j = 0; j < m; ++j) {
          const double x =
              u_a * terms[j].exit_discount + terms[j].functional;
          acc[blk][j].add(x, terms[j].truncated);
        }
      } else {
        for (std::size_t j = 0; j < m; ++j) {
          PathRng rng(cfg.master_seed, j * cfg.n_paths + path);
          SimOptions opt;
          opt.mode = caputo ? PathMode::stopped : PathMode::killed;
          opt.ds = cfg.ds;
          opt.lambda = spec.lambda;
          opt.g = spec.g;
          opt.horizon = horizon;
          opt.eps_cut = eps_cut;
          auto sample = simulate_path(spec.kernel, ts[j], spec.a, opt, rng);
          const double x = u_a * sample.exit_discount + sample.functional;
          acc[blk][j].add(x, !sample.exited);
        }
      }
    }
  });

  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Accumulator> col(n_blocks);
    for (std::size_t blk = 0; blk < n_blocks; ++blk) col[blk] = acc[blk][j];
    const McEstimate e = finalize(col, cfg.n_paths);
    auto& pt = out.points[slot[j]];
    pt.value = e.value;
    pt.std_error = e.std_error;
    pt.n_paths = e.n_paths;
    pt.truncated_fraction = e.truncated_fraction;
  }
  return out;
}

// advances one coordinate by a single step; returns the increment
double coordinate_increment(const JumpKernel& k, double cur, double ds,
                            double eps, PathRng& rng) {
  if (k.stable_order) {
    const double beta = *k.stable_order;
    double w;
    if (beta == 0.5) {
      const double zn = rng.next_normal();
      w = 0.5 / (zn * zn);
    } else {
      w = detail::kanter_standard_stable(beta, rng);
    }
    return std::pow(ds, 1.0 / beta) * w;
  }
  double inc = k.small_moment(cur, eps) * ds;
  const double rate = k.tail_mass(cur, eps);
  if (rate > 0.0) {
    const unsigned n = rng.next_poisson(rate * ds);
    for (unsigned j = 0; j < n; ++j) {
      for (int it = 0;; ++it) {
        if (it >= 100000)
          throw std::runtime_error("solve_mixed_mc: envelope rejection stuck");
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

double horizon_policy(const JumpKernel& k, double lambda, double a, double b,
                      std::vector<std::string>* warnings) {
  if (lambda > 0.0) return 50.0 / lambda;
  // expected-exit bound from the intensity floor near r = 0: jumps of size
  // ~eps arrive at rate >= floor * eps, and (b-a)/eps of them suffice
  const double eps = 0.05 * (b - a);
  double floor_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20; ++i) {
    const double t = a + (b - a) * i / 20.0;
    for (double frac : {1.0, 0.5, 0.1}) {
      floor_v = std::min(floor_v, k.nu(t, frac * eps));
    }
  }
  if (!(floor_v > 1e-12)) {
    if (warnings)
      warnings->push_back(
          "horizon policy: intensity floor vanished; lambda = 0 exit-time "
          "guarantee unavailable, using fallback horizon");
    return 1000.0 * (b - a);
  }
  const double bound = 4.0 * (b - a) / (floor_v * eps * eps);
  return 50.0 * std::min(bound, 1e4);
}

SolutionCurve solve_rl_mc(const ProblemSpec& spec,
                          const std::vector<double>& grid,
                          const McConfig& cfg) {
  return solve_linear_mc(spec, grid, cfg, /*caputo=*/false);
}

SolutionCurve solve_caputo_mc(const ProblemSpec& spec,
                              const std::vector<double>& grid,
                              const McConfig& cfg) {
  return solve_linear_mc(spec, grid, cfg, /*caputo=*/true);
}

SolutionCurve solve_mixed_mc(const ProblemSpec& spec,
                             const std::vector<std::array<double, 2>>& grid2d,
                             const McConfig& cfg) {
  if (!spec.kernel2)
    throw std::invalid_argument("solve_mixed_mc: second kernel missing");
  if (spec.lambda < 0.0)
    throw std::domain_error("solve_mixed_mc: lambda must be >= 0");
  if (spec.phi && std::fabs(spec.phi(0.0)) > 1e-12)
    throw std::domain_error("solve_mixed_mc: phi(0) must vanish");

  const JumpKernel& k1 = spec.kernel;    // killed coordinate
  const JumpKernel& k2 = *spec.kernel2;  // stopped coordinate
  SolutionCurve out;
  out.method = "mc";
  out.two_dim = true;
  out.points.resize(grid2d.size());

  const double horizon =
      cfg.horizon_override > 0.0
          ? cfg.horizon_override
          : std::max(horizon_policy(k1, spec.lambda, 0.0, spec.b1, nullptr),
                     horizon_policy(k2, spec.lambda, 0.0, spec.b2,
                                    &out.warnings));
  const double eps1 = cfg.eps_cut_frac * spec.b1;
  const double eps2 = cfg.eps_cut_frac * spec.b2;

  const bool discounted = spec.lambda > 0.0;
  const double step_factor =
      discounted ? std::exp(-spec.lambda * cfg.ds) : 1.0;
  const double d0 =
      discounted ? (1.0 - step_factor) / spec.lambda : cfg.ds;

  std::size_t interior = 0;
  std::size_t total_ties = 0;
  for (std::size_t pt_idx = 0; pt_idx < grid2d.size(); ++pt_idx) {
    const double t1 = grid2d[pt_idx][0];
    const double t2 = grid2d[pt_idx][1];
    auto& pt = out.points[pt_idx];
    pt.t1 = t1;
    pt.t2 = t2;
    if (t1 < 0.0 || t1 > spec.b1 + 1e-12 || t2 < 0.0 ||
        t2 > spec.b2 + 1e-12)
      throw std::domain_error("solve_mixed_mc: grid point outside the box");
    if (t1 == 0.0) {  // killed axis boundary
      pt.value = 0.0;
      pt.n_paths = cfg.n_paths;
      continue;
    }
    if (t2 == 0.0) {  // stopped axis boundary
      pt.value = spec.phi ? spec.phi(t1) : 0.0;
      pt.n_paths = cfg.n_paths;
      continue;
    }

    const std::size_t n_blocks = (cfg.n_paths + kBlock - 1) / kBlock;
    std::vector<Accumulator> acc(n_blocks);
    std::vector<std::size_t> ties(n_blocks, 0);
    const std::size_t point_base = interior * cfg.n_paths;
    ++interior;

    parallel_for_blocks(n_blocks, cfg.workers, [&](std::size_t blk) {
      const std::size_t lo = blk * kBlock;
      const std::size_t hi = std::min(cfg.n_paths, lo + kBlock);
      for (std::size_t path = lo; path < hi; ++path) {
        const std::uint64_t base = (point_base + path) << 1;
        PathRng rng1(cfg.master_seed, base);
        PathRng rng2(cfg.master_seed, base | 1);
        double w1 = 0.0, w2 = 0.0;
        double ef = 1.0, clock = 0.0;
        double functional = 0.0;
        double phi_term = 0.0;
        bool truncated = true;
        while (clock < horizon) {
          if (spec.g2)
            functional += spec.g2(t1 - w1, t2 - w2) * ef * d0;
          w1 += coordinate_increment(k1, t1 - w1, cfg.ds, eps1, rng1);
          w2 += coordinate_increment(k2, t2 - w2, cfg.ds, eps2, rng2);
          clock += cfg.ds;
          ef *= step_factor;
          const bool c1 = (t1 - w1 <= 0.0);
          const bool c2 = (t2 - w2 <= 0.0);
          if (c1 || c2) {
            truncated = false;
            if (c1 && c2) ++ties[blk];  // broken toward the killed coordinate
            if (c2 && !c1 && spec.phi)
              phi_term = (discounted ? ef : 1.0) * spec.phi(t1 - w1);
            break;
          }
        }
        acc[blk].add(phi_term + functional, truncated);
      }
    });

    const McEstimate e = finalize(acc, cfg.n_paths);
    pt.value = e.value;
    pt.std_error = e.std_error;
    pt.n_paths = e.n_paths;
    pt.truncated_fraction = e.truncated_fraction;
    for (std::size_t c : ties) total_ties += c;
  }
  if (total_ties > 0)
    out.warnings.push_back(
        "mixed engine: " + std::to_string(total_ties) +
        " simultaneous-exit ties broken toward the killed coordinate");
  return out;
}

McEstimate laplace_exit_mc(const JumpKernel& k, double lambda, double t,
                           double a, const McConfig& cfg) {
  if (lambda < 0.0)
    throw std::domain_error("laplace_exit_mc: lambda must be >= 0");
  if (t < a) throw std::domain_error("laplace_exit_mc: t below the barrier");
  const std::size_t n_blocks = (cfg.n_paths + kBlock - 1) / kBlock;
  std::vector<Accumulator> acc(n_blocks);
  const bool exact = k.stable_order.has_value();
  std::vector<std::string> warnings;
  const double horizon = cfg.horizon_override > 0.0
                             ? cfg.horizon_override
                             : horizon_policy(k, lambda, a, std::max(t, a + 1.0),
                                              &warnings);
  const double eps_cut = cfg.eps_cut_frac * (std::max(t, a + 1.0) - a);

  parallel_for_blocks(n_blocks, cfg.workers, [&](std::size_t blk) {
    const std::size_t lo = blk * kBlock;
    const std::size_t hi = std::min(cfg.n_paths, lo + kBlock);
    for (std::size_t path = lo; path < hi; ++path) {
      PathRng rng(cfg.master_seed, path);
      if (exact) {
        const double tau =
            sample_exit_time_stable_exact(*k.stable_order, t, a, rng);
        acc[blk].add(std::exp(-lambda * tau), false);
      } else {
        SimOptions opt;
        opt.ds = cfg.ds;
        opt.lambda = lambda;
        opt.horizon = horizon;
        opt.eps_cut = eps_cut;
        auto sample = simulate_path(k, t, a, opt, rng);
        acc[blk].add(sample.exit_discount, !sample.exited);
      }
    }
  });
  return finalize(acc, cfg.n_paths);
}

}  // namespace fracflow
