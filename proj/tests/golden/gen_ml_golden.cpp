// Generates the Mittag-Leffler golden-value fixtures by brute-force series
// summation in 512-bit arithmetic. Build and run manually when the fixture
// grids change:
//
//   g++ -O2 -o gen_ml_golden gen_ml_golden.cpp -lmpfr -lgmp
//   ./gen_ml_golden <output-dir>
//
// Output: ml_golden.csv  (columns: beta, x_or_z, value, abs_tol)
//         ml2_golden.csv (columns: beta1, beta2, z, value, abs_tol)

#include <mpfr.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

constexpr mpfr_prec_t kPrec = 512;

// E_{b1,b2}(z) = sum_j z^j / Gamma(j b1 + b2), summed until the terms are
// negligible at working precision well past the largest term.
double ml_series_mpfr(double b1, double b2, double z) {
  mpfr_t sum, term, zpow, arg, g, tiny, mb1, mb2;
  mpfr_inits2(kPrec, sum, term, zpow, arg, g, tiny, mb1, mb2,
              (mpfr_ptr)nullptr);
  mpfr_set_zero(sum, 1);
  mpfr_set_d(zpow, 1.0, MPFR_RNDN);
  // The gamma argument j*b1 + b2 must be formed in extended precision: a
  // double-rounded argument perturbs Gamma by ~1e-14 relative, which the
  // e^X-sized terms amplify into garbage.
  mpfr_set_d(mb1, b1, MPFR_RNDN);
  mpfr_set_d(mb2, b2, MPFR_RNDN);
  const double big_x = std::pow(std::fabs(z), 1.0 / b1);
  for (int j = 0; j < 100000; ++j) {
    mpfr_mul_ui(arg, mb1, static_cast<unsigned long>(j), MPFR_RNDN);
    mpfr_add(arg, arg, mb2, MPFR_RNDN);
    mpfr_gamma(g, arg, MPFR_RNDN);
    mpfr_div(term, zpow, g, MPFR_RNDN);
    mpfr_add(sum, sum, term, MPFR_RNDN);
    mpfr_mul_d(zpow, zpow, z, MPFR_RNDN);
    if (j * b1 >= big_x + 5.0) {
      mpfr_abs(tiny, term, MPFR_RNDN);
      mpfr_abs(g, sum, MPFR_RNDN);
      mpfr_mul_2si(g, g, -400, MPFR_RNDN);  // |sum| * 2^-400
      if (mpfr_cmp(tiny, g) < 0) break;
    }
  }
  const double out = mpfr_get_d(sum, MPFR_RNDN);
  mpfr_clears(sum, term, zpow, arg, g, tiny, mb1, mb2, (mpfr_ptr)nullptr);
  return out;
}

void emit(std::FILE* f, double beta, double z) {
  const double v = ml_series_mpfr(beta, 1.0, z);
  const double tol = std::max(1e-13, 1e-10 * std::fabs(v));
  std::fprintf(f, "%.4f,%.17g,%.17g,%.3g\n", beta, z, v, tol);
}

void emit2(std::FILE* f, double b1, double b2, double z) {
  const double v = ml_series_mpfr(b1, b2, z);
  const double tol = std::max(1e-13, 1e-10 * std::fabs(v));
  std::fprintf(f, "%.4f,%.4f,%.17g,%.17g,%.3g\n", b1, b2, z, v, tol);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : ".";
  const std::vector<double> betas{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.999};
  // Sample each evaluation regime: X = |z|^(1/beta) in the series range
  // (<= 6), the spectral range (6, 30) and just past the asymptotic switch.
  const std::vector<double> xs{0.5, 2.0, 5.9, 6.1, 12.0, 20.0, 29.0, 35.0};

  std::FILE* f1 = std::fopen((dir + "/ml_golden.csv").c_str(), "w");
  std::FILE* f2 = std::fopen((dir + "/ml2_golden.csv").c_str(), "w");
  if (!f1 || !f2) {
    std::fprintf(stderr, "cannot open output files in %s\n", dir.c_str());
    return 1;
  }
  std::fprintf(f1, "beta,x_or_z,value,abs_tol\n");
  std::fprintf(f2, "beta1,beta2,z,value,abs_tol\n");

  for (double b : betas) {
    emit(f1, b, -0.25);
    emit(f1, b, -1.0);
    emit(f1, b, 1.0);
    emit(f1, b, 2.5);
    for (double x : xs) emit(f1, b, -std::pow(x, b));
    emit2(f2, b, b, -0.25);
    emit2(f2, b, b, -1.0);
    emit2(f2, b, b, 1.0);
    emit2(f2, b, 1.0, -1.0);
    for (double x : xs) emit2(f2, b, b, -std::pow(x, b));
  }
  // A couple of orders above 1.
  for (double b : {1.25, 1.5, 2.0}) {
    emit(f1, b, -1.0);
    emit(f1, b, -20.0);
    emit(f1, b, 2.0);
  }

  std::fclose(f1);
  std::fclose(f2);
  return 0;
}
