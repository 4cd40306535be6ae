#include "fracflow/stable.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "fracflow/quadrature.hpp"
#include "fracflow/special.hpp"

namespace fracflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Bisection for the phi where z*U(phi) - h0 reaches `level`; U is monotone
// increasing on (0,pi) for the one-sided laws. Split points only need a few
// correct digits.
double find_level(double beta, double z, double h0, double level) {
  double lo = 0.0, hi = kPi;
  auto excess = [&](double phi) {
    const double lnu = detail::zolotarev_log_angular(beta, phi);
    const double lnh = std::log(z) + lnu;
    if (lnh > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(lnh) - h0;
  };
  if (excess(kPi * (1.0 - 1e-14)) < level) return kPi;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) < level)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

namespace detail {

double zolotarev_log_angular(double beta, double phi) {
  // U(phi) = [sin(b phi)/sin(phi)]^{b/(1-b)} * sin((1-b) phi)/sin(phi)
  if (phi <= 0.0)
    return (beta * std::log(beta) + (1.0 - beta) * std::log1p(-beta)) /
           (1.0 - beta);
  const double b = beta;
  return (b / (1.0 - b)) * std::log(std::sin(b * phi)) +
         std::log(std::sin((1.0 - b) * phi)) -
         (1.0 / (1.0 - b)) * std::log(std::sin(phi));
}

double stable_series_switch(double beta) { return std::pow(2.0, 1.0 / beta); }

double stable_density_series(double beta, double x, bool& ok) {
  // w(x) = (1/pi) sum_{k>=1} (-1)^{k+1} Gamma(k b + 1)/k! sin(pi k b) x^{-kb-1}
  // convergent for all x > 0, used where x^beta >= 2 so it converges fast.
  // Termination uses the sin-free envelope: sin(pi k b) has incidental zeros.
  const double q = std::pow(x, -beta);
  const double lnq = std::log(q);
  double sum = 0.0;
  double lkfac = 0.0;
  ok = false;
  for (int k = 1; k <= 400; ++k) {
    lkfac += std::log(static_cast<double>(k));
    const double arg = k * beta + 1.0;
    const double lenv =
        (arg > 141.0 ? log_gamma(arg) : std::log(gamma_fn(arg))) - lkfac +
        k * lnq;
    const double env = (lenv < -745.0) ? 0.0 : std::exp(lenv);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * env * std::sin(kPi * k * beta) / kPi;
    if (env <= 1e-16 * std::fabs(sum) + 1e-320) {
      ok = true;
      break;
    }
  }
  return sum / x;
}

double stable_density_integral(double beta, double x, bool& warn) {
  // w(x) = C * Int_0^pi U e^{-z U} dphi,
  // C = beta/((1-beta) pi) x^{-1/(1-beta)}, z = x^{-beta/(1-beta)}.
  warn = false;
  const double z = std::pow(x, -beta / (1.0 - beta));
  const double lnz = std::log(z);
  const double h0 = z * std::exp(zolotarev_log_angular(beta, 0.0));
  const double lnC = std::log(beta / ((1.0 - beta) * kPi)) -
                     std::log(x) / (1.0 - beta);
  if (lnC - h0 < -745.0) return 0.0;  // deep left tail underflows

  auto integrand = [&](double phi) {
    const double lnu = zolotarev_log_angular(beta, phi);
    const double lnh = lnz + lnu;
    if (lnh > 690.0) return 0.0;
    const double h = std::exp(lnh);
    const double le = lnu - (h - h0);
    return le < -745.0 ? 0.0 : std::exp(le);
  };

  std::vector<double> pts{0.0};
  for (double level : {1.0, 5.0, 50.0, 130.0}) {
    const double p = find_level(beta, z, h0, level);
    if (p > pts.back() * (1.0 + 1e-14) && p < kPi) pts.push_back(p);
  }
  pts.push_back(kPi);

  QuadOptions opt;
  opt.abs_tol = 1e-280;
  opt.rel_tol = 1e-11;
  auto r = integrate_split(integrand, pts, opt);
  if (!r.converged) warn = true;
  return std::exp(lnC - h0) * r.value;
}

double stable_cdf_series_upper(double beta, double x, bool& ok) {
  // 1 - F(x) = (1/pi) sum_{k>=1} (-1)^{k+1} Gamma(k b)/k! sin(pi k b) x^{-kb}
  const double lnq = -beta * std::log(x);
  double sum = 0.0;
  double lkfac = 0.0;
  ok = false;
  for (int k = 1; k <= 400; ++k) {
    lkfac += std::log(static_cast<double>(k));
    const double arg = k * beta;
    const double lenv =
        (arg > 141.0 ? log_gamma(arg) : std::log(gamma_fn(arg))) - lkfac +
        k * lnq;
    const double env = (lenv < -745.0) ? 0.0 : std::exp(lenv);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * env * std::sin(kPi * k * beta) / kPi;
    if (env <= 1e-16 * std::fabs(sum) + 1e-320) {
      ok = true;
      break;
    }
  }
  return sum;
}

double stable_cdf_integral(double beta, double x, bool& warn) {
  // F(x) = (1/pi) Int_0^pi e^{-z U(phi)} dphi
  warn = false;
  const double z = std::pow(x, -beta / (1.0 - beta));
  const double lnz = std::log(z);
  const double h0 = z * std::exp(zolotarev_log_angular(beta, 0.0));
  if (h0 > 745.0) return 0.0;

  auto integrand = [&](double phi) {
    const double lnh = lnz + zolotarev_log_angular(beta, phi);
    if (lnh > 690.0) return 0.0;
    const double h = std::exp(lnh);
    return h > 745.0 ? 0.0 : std::exp(-h);
  };

  std::vector<double> pts{0.0};
  for (double level : {1.0, 5.0, 50.0, 130.0}) {
    const double p = find_level(beta, z, h0, level);
    if (p > pts.back() * (1.0 + 1e-14) && p < kPi) pts.push_back(p);
  }
  pts.push_back(kPi);

  QuadOptions opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-11;
  auto r = integrate_split(integrand, pts, opt);
  if (!r.converged) warn = true;
  return r.value / kPi;
}

double kanter_standard_stable(double beta, PathRng& rng) {
  const double phi = kPi * rng.next_double();
  const double xi = rng.next_exponential();
  const double lnu = zolotarev_log_angular(beta, phi);
  return std::exp(((1.0 - beta) / beta) * (lnu - std::log(xi)));
}

}  // namespace detail

double stable_density(const StableParams& p, double x) {
  return stable_density_ex(p, x).value;
}

StableEval stable_density_ex(const StableParams& p, double x) {
  StableEval out;
  if (!(x > 0.0)) return out;
  const double beta = p.beta();
  if (x >= detail::stable_series_switch(beta)) {
    bool ok = false;
    const double v = detail::stable_density_series(beta, x, ok);
    if (ok) {
      out.value = v;
      return out;
    }
  }
  bool warn = false;
  out.value = detail::stable_density_integral(beta, x, warn);
  out.accuracy_warning = warn;
  if (out.value < 0.0) out.value = 0.0;  // roundoff guard near underflow
  return out;
}

double stable_cdf(const StableParams& p, double x) {
  if (!(x > 0.0)) return 0.0;
  const double beta = p.beta();
  if (x >= detail::stable_series_switch(beta)) {
    bool ok = false;
    const double upper = detail::stable_cdf_series_upper(beta, x, ok);
    if (ok) return std::min(1.0, std::max(0.0, 1.0 - upper));
  }
  bool warn = false;
  const double v = detail::stable_cdf_integral(beta, x, warn);
  return std::min(1.0, std::max(0.0, v));
}

double check_ml_stable_identity(double beta, double u) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::domain_error("check_ml_stable_identity: beta outside (0,1)");
  if (u < 0.0)
    throw std::domain_error("check_ml_stable_identity: u must be >= 0");
  const StableParams p(beta);
  auto integrand = [&](double y) {
    const double xval = std::pow(y, -1.0 / beta);
    const double w = stable_density(p, xval);
    if (w == 0.0) return 0.0;
    return std::exp(-u * y) * std::pow(y, -1.0 - 1.0 / beta) * w;
  };
  QuadOptions opt;
  opt.abs_tol = 1e-11;
  opt.rel_tol = 1e-10;
  auto head = integrate(integrand, 0.0, 2.0, opt);
  auto tail = integrate_semi_inf(integrand, 2.0, opt, 2.0);
  if (!head.converged || !tail.converged)
    throw QuadratureError("check_ml_stable_identity: integral did not converge",
                          head.error + tail.error);
  return beta * mittag_leffler(beta, -u) - (head.value + tail.value);
}

CachedStableDensity::CachedStableDensity(double beta) : beta_(beta) {
  const StableParams p(beta);
  x_switch_ = detail::stable_series_switch(beta);
  // below x_lo the density is within a few hundred log-units of underflow;
  // direct evaluation covers that rarely-hit region
  const double u0 = std::exp(detail::zolotarev_log_angular(beta, 0.0));
  x_lo_ = std::pow(550.0 / u0, -(1.0 - beta) / beta);

  mid_.emplace(
      [&](double lx) { return std::log(stable_density(p, std::exp(lx))); },
      std::log(x_lo_), std::log(x_switch_ * 1.0001), 1e-13, 1025);

  // tail factor T(q) with w(x) = T(q) q / x, q = x^{-beta} in (0, 1/2]
  tail_.emplace(
      [&](double q) {
        if (q <= 0.0) {
          // leading series coefficient
          return gamma_fn(beta + 1.0) * std::sin(kPi * beta) / kPi;
        }
        const double x = std::pow(q, -1.0 / beta);
        return stable_density(p, x) * x / q;
      },
      0.0, 0.5001, 1e-13, 257);
  if (!mid_->converged() || !tail_->converged())
    throw QuadratureError("CachedStableDensity: proxy fit did not converge",
                          0.0);
}

double CachedStableDensity::operator()(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (x >= x_switch_) {
    const double q = std::pow(x, -beta_);
    return (*tail_)(q)*q / x;
  }
  if (x <= x_lo_) return stable_density(StableParams(beta_), x);
  return std::exp((*mid_)(std::log(x)));
}

double sample_stable_increment(double beta, double ds, PathRng& rng) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::domain_error("sample_stable_increment: beta outside (0,1)");
  if (!(ds > 0.0))
    throw std::domain_error("sample_stable_increment: ds must be positive");
  double w;
  if (beta == 0.5) {
    // scale-1/2 one-sided law: 1/(2 Z^2) with Z standard normal
    const double zn = rng.next_normal();
    w = 0.5 / (zn * zn);
  } else {
    w = detail::kanter_standard_stable(beta, rng);
  }
  return std::pow(ds, 1.0 / beta) * w;
}

}  // namespace fracflow
