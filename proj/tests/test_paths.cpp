#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracflow/kernels.hpp"
#include "fracflow/paths.hpp"
#include "fracflow/quadrature.hpp"
#include "fracflow/special.hpp"
#include "fracflow/stable.hpp"

using namespace fracflow;

namespace {

struct MeanSe {
  double mean;
  double se;
};

template <class F>
MeanSe monte_carlo(int n, std::uint64_t seed, F&& draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    PathRng rng(seed, static_cast<std::uint64_t>(i));
    const double v = draw(rng);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  return {mean, std::sqrt(std::max(0.0, s2 / n - mean * mean) / (n - 1.0))};
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] < b[ib])
      ++ia;
    else
      ++ib;
    d = std::max(d, std::fabs(static_cast<double>(ia) / a.size() -
                              static_cast<double>(ib) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("exact exit-time sampler: boundary and Laplace transform") {
  PathRng rng(5150, 0);
  CHECK(sample_exit_time_stable_exact(0.5, 1.0, 1.0, rng) == 0.0);

  // E[e^{-tau}] = E_{1/2}(-1) for t-a = 1
  auto r = monte_carlo(100000, 811, [](PathRng& g) {
    return std::exp(-sample_exit_time_stable_exact(0.5, 1.0, 0.0, g));
  });
  const double want = mittag_leffler(0.5, -1.0);
  CHECK(std::fabs(r.mean - want) < 3.0 * r.se);

  // E[tau] = (t-a)^beta / Gamma(1+beta); oracle via a numeric derivative of
  // the Mittag-Leffler transform at 0
  auto m = monte_carlo(200000, 877, [](PathRng& g) {
    return sample_exit_time_stable_exact(0.5, 1.0, 0.0, g);
  });
  const double h = 1e-6;
  const double ml_deriv = (1.0 - mittag_leffler(0.5, -h)) / h;
  CHECK(ml_deriv == doctest::Approx(1.0 / gamma_fn(1.5)).epsilon(1e-5));
  CHECK(ml_deriv == doctest::Approx(1.1283791671).epsilon(1e-5));
  CHECK(std::fabs(m.mean - 1.1283791671) < 3.0 * m.se);
}

TEST_CASE("exit-time density: normalization and Laplace transform") {
  QuadOptions opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 1e-9;
  auto norm = integrate([](double s) {
    return exit_time_density_stable(0.5, 1.0, 0.0, s);
  }, 0.0, 8.0, opt);
  auto norm_tail = integrate_semi_inf([](double s) {
    return exit_time_density_stable(0.5, 1.0, 0.0, s);
  }, 8.0, opt, 8.0);
  CHECK(norm.value + norm_tail.value == doctest::Approx(1.0).epsilon(1e-6));

  auto lap = integrate([](double s) {
    return std::exp(-s) * exit_time_density_stable(0.5, 1.0, 0.0, s);
  }, 0.0, 40.0, opt);
  CHECK(lap.value ==
        doctest::Approx(mittag_leffler(0.5, -1.0)).epsilon(1e-6));
}

TEST_CASE("exact sampler matches the density (chi^2 on quantile bins)") {
  // invert the cdf F(s) = 1 - stable_cdf((t-a) s^{-1/beta}) by bisection
  const double beta = 0.7;
  StableParams p(beta);
  auto cdf_tau = [&](double s) {
    return 1.0 - stable_cdf(p, std::pow(s, -1.0 / beta));
  };
  const int nbins = 20;
  std::vector<double> edges;
  for (int i = 1; i < nbins; ++i) {
    const double target = static_cast<double>(i) / nbins;
    double lo = 1e-9, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
      const double mid = std::sqrt(lo * hi);
      (cdf_tau(mid) < target ? lo : hi) = mid;
    }
    edges.push_back(std::sqrt(lo * hi));
  }
  const int n = 100000;
  std::vector<int> count(nbins, 0);
  for (int i = 0; i < n; ++i) {
    PathRng rng(31337, static_cast<std::uint64_t>(i));
    const double tau = sample_exit_time_stable_exact(beta, 1.0, 0.0, rng);
    const auto it = std::upper_bound(edges.begin(), edges.end(), tau);
    ++count[static_cast<int>(it - edges.begin())];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(n) / nbins;
  for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
  // 19 dof at the 0.01 level
  CHECK(chi2 < 36.19);
}

TEST_CASE("simulate_path basics on the exact stable route") {
  auto k = kernel_stable(0.5);
  SimOptions opt;
  opt.ds = 1e-3;
  opt.lambda = 1.0;
  opt.horizon = 50.0;

  // t0 = a: immediate exit
  PathRng rng(1, 0);
  auto p0 = simulate_path(k, 0.0, 0.0, opt, rng);
  CHECK(p0.exited);
  CHECK(p0.exit_time == 0.0);
  CHECK(p0.functional == 0.0);

  // g absent: functional identically zero; paths monotone when recorded
  SimOptions rec = opt;
  rec.record = true;
  for (int i = 0; i < 50; ++i) {
    PathRng g(7, static_cast<std::uint64_t>(i));
    auto path = simulate_path(k, 1.0, 0.0, rec, g);
    CHECK(path.functional == 0.0);
    CHECK(path.exited);
    for (std::size_t j = 1; j < path.states.size(); ++j)
      CHECK(path.states[j] <= path.states[j - 1]);
  }

  // stopped and killed agree before the exit time under a shared stream
  SimOptions killed = rec;
  killed.mode = PathMode::killed;
  PathRng g1(21, 5), g2(21, 5);
  auto ps = simulate_path(k, 1.0, 0.0, rec, g1);
  auto pk = simulate_path(k, 1.0, 0.0, killed, g2);
  REQUIRE(ps.states.size() == pk.states.size() + 1);  // final landing state
  for (std::size_t j = 0; j < pk.states.size(); ++j) {
    CHECK(ps.times[j] == pk.times[j]);
    CHECK(ps.states[j] == pk.states[j]);
  }
  CHECK(ps.states.back() == 0.0);
  CHECK(ps.exit_time == pk.exit_time);

  // determinism: identical (seed, stream) reproduces the sample exactly
  PathRng g3(21, 5);
  auto again = simulate_path(k, 1.0, 0.0, rec, g3);
  CHECK(again.exit_time == ps.exit_time);
  CHECK(again.functional == ps.functional);
  CHECK(again.states == ps.states);
}

TEST_CASE("discounted functional of g = 1 matches (1 - E_beta(-lambda))/lambda") {
  auto k = kernel_stable(0.5);
  SimOptions opt;
  opt.ds = 1e-3;
  opt.lambda = 1.0;
  opt.horizon = 50.0;
  opt.g = [](double) { return 1.0; };
  auto r = monte_carlo(20000, 909, [&](PathRng& g) {
    return simulate_path(k, 1.0, 0.0, opt, g).functional;
  });
  const double want = 1.0 - mittag_leffler(0.5, -1.0);
  CHECK(std::fabs(r.mean - want) < 3.0 * r.se + 2.0 * opt.ds);
}

TEST_CASE("thinning route reproduces the stable law") {
  // single-term multi-term kernel is mathematically the stable kernel, but
  // runs through the Poisson-thinning machinery
  auto k = kernel_multi_term({[](double) { return 1.0; }}, {0.5});
  SimOptions opt;
  opt.ds = 1e-3;
  opt.lambda = 1.0;
  opt.horizon = 50.0;
  opt.eps_cut = 1e-4;
  auto r = monte_carlo(20000, 13331, [&](PathRng& g) {
    return simulate_path(k, 1.0, 0.0, opt, g).exit_discount;
  });
  const double want = mittag_leffler(0.5, -1.0);
  CHECK(std::fabs(r.mean - want) < 3.0 * r.se + 3.0 * opt.ds);
}

TEST_CASE("step-detected exit times vs exact sampler (KS)") {
  auto k = kernel_stable(0.5);
  SimOptions opt;
  opt.ds = 1e-3;
  opt.horizon = 200.0;
  const int n = 100000;
  std::vector<double> stepped(n), exact(n);
  for (int i = 0; i < n; ++i) {
    PathRng g1(5551, static_cast<std::uint64_t>(i));
    stepped[i] = simulate_path(k, 1.0, 0.0, opt, g1).exit_time;
    PathRng g2(5552, static_cast<std::uint64_t>(i));
    exact[i] = sample_exit_time_stable_exact(0.5, 1.0, 0.0, g2);
  }
  CHECK(ks_two_sample(stepped, exact) < 0.01);
}

TEST_CASE("exit-time bias decreases as ds is halved") {
  auto k = kernel_stable(0.5);
  const double want = mittag_leffler(0.5, -1.0);
  std::vector<double> errs;
  double se_last = 0.0;
  for (double ds : {0.01, 0.005, 0.0025}) {
    SimOptions opt;
    opt.ds = ds;
    opt.lambda = 1.0;
    opt.horizon = 100.0;
    auto r = monte_carlo(1000000, 4242, [&](PathRng& g) {
      return simulate_path(k, 1.0, 0.0, opt, g).exit_discount;
    });
    errs.push_back(std::fabs(r.mean - want));
    se_last = r.se;
  }
  CHECK(errs[0] > errs[2]);
  CHECK(errs[0] > errs[1] - 2.0 * se_last);
  CHECK(errs[1] > errs[2] - 2.0 * se_last);
}

TEST_CASE("joint density: support, marginal, and simulated histogram") {
  const double beta = 0.5, t = 1.0, a = 0.0, s = 0.3;

  CHECK(joint_density_stable(beta, t, a, 0.7, 0.5, 0.7) == 0.0);
  CHECK(joint_density_stable(beta, t, a, 0.8, 0.5, 0.7) == 0.0);
  CHECK(joint_density_stable(beta, t, a, 0.3, 1.2, 0.9) == 0.0);

  // marginal: Int_a^t Int_s^inf joint = P[tau > s] = Int_a^t p_s(t,r) dr,
  // both sides by quadrature
  QuadOptions opt;
  opt.abs_tol = 1e-8;
  opt.rel_tol = 1e-7;
  StableParams p(beta);
  auto inner = [&](double r) {
    auto q = integrate_semi_inf(
        [&](double xi) { return joint_density_stable(beta, t, a, s, r, xi); },
        s, opt, 1.0);
    return q.value;
  };
  auto lhs = integrate(inner, a, t, opt);
  auto rhs = integrate(
      [&](double r) {
        const double sp = std::pow(s, -1.0 / beta);
        return sp * stable_density(p, sp * (t - r));
      },
      a, t, opt);
  CHECK(lhs.value == doctest::Approx(rhs.value).epsilon(1e-4));

  // coarse-bin chi^2 of simulated (T(s), tau) against the joint density
  auto k = kernel_stable(beta);
  SimOptions sopt;
  sopt.ds = 1e-3;
  sopt.horizon = 100.0;
  sopt.query_time = s;
  const std::vector<double> r_edges{0.0, 0.4, 0.7, 1.0};
  const std::vector<double> xi_edges{s, 0.6, 1.2,
                                     std::numeric_limits<double>::infinity()};
  const int n = 100000;
  std::vector<std::vector<int>> obs(3, std::vector<int>(3, 0));
  int alive = 0;
  for (int i = 0; i < n; ++i) {
    PathRng g(60321, static_cast<std::uint64_t>(i));
    auto path = simulate_path(k, t, a, sopt, g);
    if (!(path.exit_time > s) || std::isnan(path.state_at_query)) continue;
    ++alive;
    int ir = 2, ix = 2;
    for (int j = 0; j < 3; ++j)
      if (path.state_at_query <= r_edges[j + 1]) {
        ir = j;
        break;
      }
    for (int j = 0; j < 3; ++j)
      if (path.exit_time <= xi_edges[j + 1]) {
        ix = j;
        break;
      }
    ++obs[ir][ix];
  }
  // expected cell masses by quadrature of the joint density
  double ptau = 0.0;
  std::vector<std::vector<double>> cell(3, std::vector<double>(3, 0.0));
  for (int ir = 0; ir < 3; ++ir) {
    for (int ix = 0; ix < 3; ++ix) {
      auto mass = integrate(
          [&](double r) {
            const double hi = std::min(xi_edges[ix + 1], 60.0);
            auto q = integrate(
                [&](double xi) {
                  return joint_density_stable(beta, t, a, s, r, xi);
                },
                xi_edges[ix], hi, opt);
            return q.value;
          },
          r_edges[ir], r_edges[ir + 1], opt);
      cell[ir][ix] = mass.value;
      ptau += mass.value;
    }
  }
  double chi2 = 0.0;
  for (int ir = 0; ir < 3; ++ir) {
    for (int ix = 0; ix < 3; ++ix) {
      const double expected = alive * cell[ir][ix] / ptau;
      REQUIRE(expected > 20.0);
      chi2 += (obs[ir][ix] - expected) * (obs[ir][ix] - expected) / expected;
    }
  }
  // 8 dof at the 0.01 level
  CHECK(chi2 < 20.09);
}
