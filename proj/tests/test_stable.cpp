#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracflow/quadrature.hpp"
#include "fracflow/special.hpp"
#include "fracflow/stable.hpp"
#include "support/fourier_oracle.hpp"

using namespace fracflow;

namespace {

double levy_density(double x) {
  // closed form at beta = 1/2 under the exp(-sqrt(lambda)) convention
  return x <= 0.0 ? 0.0
                  : 0.5 / std::sqrt(std::numbers::pi) * std::pow(x, -1.5) *
                        std::exp(-0.25 / x);
}

}  // namespace

TEST_CASE("StableParams rejects endpoints") {
  CHECK_THROWS_AS(StableParams(0.0), std::domain_error);
  CHECK_THROWS_AS(StableParams(1.0), std::domain_error);
  CHECK_THROWS_AS(StableParams(-0.2), std::domain_error);
  CHECK(StableParams(0.5).beta() == 0.5);
}

TEST_CASE("beta=1/2 closed-form density") {
  StableParams p(0.5);
  for (double x : {0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1000.0, 1e-3}) {
    CAPTURE(x);
    CHECK(stable_density(p, x) ==
          doctest::Approx(levy_density(x)).epsilon(1e-9));
  }
  // spot value derived from the closed form
  CHECK(stable_density(p, 1.0) == doctest::Approx(0.21969564473386122).epsilon(1e-9));
}

TEST_CASE("one-sided support and left-tail underflow") {
  for (double beta : {0.3, 0.5, 0.7, 0.9}) {
    StableParams p(beta);
    CHECK(stable_density(p, 0.0) == 0.0);
    CHECK(stable_density(p, -1.0) == 0.0);
    CHECK(stable_cdf(p, 0.0) == 0.0);
    CHECK(stable_cdf(p, -3.0) == 0.0);
  }
  // x -> 0+ limit
  CHECK(stable_density(StableParams(0.5), 1e-8) == 0.0);
}

TEST_CASE("density is nonnegative and normalized") {
  for (double beta : {0.3, 0.5, 0.7, 0.9}) {
    CAPTURE(beta);
    StableParams p(beta);
    auto f = [&](double x) { return stable_density(p, x); };
    QuadOptions opt;
    opt.abs_tol = 1e-9;
    opt.rel_tol = 1e-9;
    auto head = integrate(f, 0.0, 4.0, opt);
    auto tail = integrate_semi_inf(f, 4.0, opt, 4.0, 80);
    CHECK(head.converged);
    CHECK(head.value + tail.value == doctest::Approx(1.0).epsilon(1e-6));
    for (double x : {1e-3, 0.02, 0.3, 1.0, 2.7, 15.0, 900.0})
      CHECK(stable_density(p, x) >= 0.0);
  }
}

TEST_CASE("Laplace-transform pin: Int exp(-lambda x) w = exp(-lambda^beta)") {
  for (double beta : {0.3, 0.5, 0.7, 0.9}) {
    StableParams p(beta);
    for (double lambda : {0.5, 1.0, 2.0}) {
      CAPTURE(beta);
      CAPTURE(lambda);
      auto f = [&](double x) {
        return std::exp(-lambda * x) * stable_density(p, x);
      };
      QuadOptions opt;
      opt.abs_tol = 1e-10;
      opt.rel_tol = 1e-9;
      auto head = integrate(f, 0.0, 4.0, opt);
      auto tail = integrate_semi_inf(f, 4.0, opt, 4.0, 80);
      CHECK(head.value + tail.value ==
            doctest::Approx(std::exp(-std::pow(lambda, beta))).epsilon(1e-6));
    }
  }
}

TEST_CASE("Fourier-form oracle agreement on a sample grid") {
  for (double beta : {0.5, 0.6, 0.75}) {
    StableParams p(beta);
    for (double x : {0.5, 1.0, 2.0}) {
      CAPTURE(beta);
      CAPTURE(x);
      const double oracle = testing::stable_density_fourier(beta, x, 1e-10);
      CHECK(stable_density(p, x) == doctest::Approx(oracle).epsilon(1e-7));
    }
  }
}

TEST_CASE("series and integral regimes agree at the switch point") {
  for (double beta : {0.35, 0.5, 0.65, 0.8, 0.9}) {
    CAPTURE(beta);
    const double xs = detail::stable_series_switch(beta);
    bool ok = false, warn = false;
    const double a = detail::stable_density_series(beta, xs, ok);
    const double b = detail::stable_density_integral(beta, xs, warn);
    CHECK(ok);
    CHECK_FALSE(warn);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));

    const double cu = detail::stable_cdf_series_upper(beta, xs, ok);
    const double ci = detail::stable_cdf_integral(beta, xs, warn);
    CHECK(1.0 - cu == doctest::Approx(ci).epsilon(1e-9));
  }
}

TEST_CASE("cdf: monotone, normalized, beta=1/2 closed form") {
  StableParams p(0.5);
  // F(x) = erfc(1/(2 sqrt(x)))
  for (double x : {0.1, 0.5, 1.0, 2.0, 10.0, 150.0}) {
    CAPTURE(x);
    CHECK(stable_cdf(p, x) ==
          doctest::Approx(std::erfc(0.5 / std::sqrt(x))).epsilon(1e-8));
  }
  CHECK(stable_cdf(p, 1.0) == doctest::Approx(0.47950012218695346).epsilon(1e-8));
  // the upper tail is polynomial, ~ x^{-beta}/Gamma(1-beta); at 1e9 it is
  // still ~1.8e-5 for beta = 1/2, so "within 1e-6 of 1" needs a farther proxy
  CHECK(stable_cdf(p, 1e9) == doctest::Approx(1.0).epsilon(2e-5));
  CHECK(stable_cdf(p, 1e13) == doctest::Approx(1.0).epsilon(1e-6));

  for (double beta : {0.3, 0.7}) {
    StableParams q(beta);
    double prev = 0.0;
    for (double x = 0.05; x < 40.0; x *= 1.7) {
      const double v = stable_cdf(q, x);
      CHECK(v >= prev);
      prev = v;
    }
    const double tail_bound =
        std::pow(1e9, -beta) * inv_gamma(1.0 - beta) * 1.5 + 1e-6;
    CHECK(stable_cdf(q, 1e9) == doctest::Approx(1.0).epsilon(tail_bound));
  }
}

TEST_CASE("identity residual: beta E_beta(-u) vs density integral") {
  // u = 0 reduces to a normalization statement
  CHECK(std::fabs(check_ml_stable_identity(0.5, 0.0)) < 1e-8);
  CHECK(std::fabs(check_ml_stable_identity(0.5, 1.0)) < 1e-6);
  CHECK(std::fabs(check_ml_stable_identity(0.7, 10.0)) < 1e-6);
  for (double beta : {0.4, 0.6}) {
    for (double u : {0.1, 1.0, 10.0}) {
      CAPTURE(beta);
      CAPTURE(u);
      CHECK(std::fabs(check_ml_stable_identity(beta, u)) < 1e-6);
    }
  }
  CHECK_THROWS_AS(check_ml_stable_identity(1.2, 1.0), std::domain_error);
  CHECK_THROWS_AS(check_ml_stable_identity(0.5, -1.0), std::domain_error);
}

TEST_CASE("sampler: positivity, scaling, Laplace transform") {
  PathRng rng(20240901, 7);
  // all draws positive
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_stable_increment(0.7, 0.01, rng) > 0.0);
  }
  // ds scaling: same stream, factor 2^{1/beta}
  for (double beta : {0.3, 0.5, 0.8}) {
    PathRng r1(99, 5), r2(99, 5);
    for (int i = 0; i < 100; ++i) {
      const double a = sample_stable_increment(beta, 1.0, r1);
      const double b = sample_stable_increment(beta, 2.0, r2);
      CHECK(b == doctest::Approx(std::pow(2.0, 1.0 / beta) * a).epsilon(1e-13));
    }
  }
  // E[exp(-X)] = exp(-ds * lambda^beta) at lambda = 1
  for (double beta : {0.3, 0.5, 0.7}) {
    CAPTURE(beta);
    PathRng r(123456, 42);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = std::exp(-sample_stable_increment(beta, 1.0, r));
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / n;
    const double se =
        std::sqrt((sumsq / n - mean * mean) / (n - 1));
    const double want = std::exp(-1.0);
    CHECK(std::fabs(mean - want) < 3.5 * se);
  }
}

TEST_CASE("beta=1/2 fast path matches the general angular sampler in law") {
  // two-sample Kolmogorov-Smirnov at n = 20000 each
  const int n = 20000;
  std::vector<double> a(n), b(n);
  PathRng r1(777, 1), r2(777, 2);
  for (int i = 0; i < n; ++i) {
    a[i] = sample_stable_increment(0.5, 1.0, r1);  // fast path
    b[i] = detail::kanter_standard_stable(0.5, r2);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] < b[ib])
      ++ia;
    else
      ++ib;
    d = std::max(d, std::fabs(static_cast<double>(ia) / n -
                              static_cast<double>(ib) / n));
  }
  // critical value at alpha=0.001 is ~1.95*sqrt(2/n) = 0.0195
  CHECK(d < 0.0195);
}

TEST_CASE("rng streams are deterministic and order-independent") {
  PathRng a(42, 3), b(42, 3), c(42, 4);
  std::vector<std::uint64_t> seq;
  for (int i = 0; i < 16; ++i) seq.push_back(a.next_u64());
  for (int i = 0; i < 16; ++i) CHECK(b.next_u64() == seq[i]);
  bool differs = false;
  for (int i = 0; i < 16; ++i) differs |= (c.next_u64() != seq[i]);
  CHECK(differs);
}
