#ifndef FRACFLOW_SPECIAL_HPP
#define FRACFLOW_SPECIAL_HPP

namespace fracflow {

// Gamma function via a Lanczos approximation (g = 7, 9 terms), with the
// reflection formula for arguments below 1/2. Poles return +/-inf.
double gamma_fn(double x);

// log|Gamma(x)| for x > 0.
double log_gamma(double x);

// 1/Gamma(x) for any real x; exactly 0 at the poles x = 0, -1, -2, ...
double inv_gamma(double x);

// One-parameter Mittag-Leffler function E_beta(z) for beta in (0,2],
// real z. Relative accuracy target 1e-10 for |z| <= 50; beyond that the
// asymptotic regime is accurate to better than 1e-8.
double mittag_leffler(double beta, double z);

// Two-parameter Mittag-Leffler function E_{beta1,beta2}(z), beta1 in (0,2],
// beta2 > 0. Same accuracy contract as mittag_leffler.
double mittag_leffler2(double beta1, double beta2, double z);

namespace detail {

// Individual evaluation regimes, exposed so the switchover agreement can be
// tested directly.
double ml_series(double beta1, double beta2, double z);
double ml_spectral_neg(double beta1, double beta2, double x);    // z = -x < 0
double ml_asymptotic_neg(double beta1, double beta2, double x);  // z = -x < 0
double ml_residue_pair(double beta1, double beta2, double x);    // 0 if b1 <= 1
double ml_kummer_e1(double beta2, double x);                     // E_{1,b}(-x)

// Regime boundaries for negative arguments, expressed through X = x^(1/beta).
// The series loses roughly exp(X)*eps absolute accuracy to cancellation, the
// asymptotic tail is accurate to about exp(-X); the spectral integral covers
// the gap.
inline constexpr double kMlSeriesMaxX = 6.0;
inline constexpr double kMlAsymptoticMinX = 30.0;

}  // namespace detail

}  // namespace fracflow

#endif  // FRACFLOW_SPECIAL_HPP
