#ifndef FRACFLOW_QUADRATURE_HPP
#define FRACFLOW_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracflow {

// Thrown when an adaptive rule cannot reach the requested tolerance.
// Carries the error estimate actually achieved so callers can report it.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_(achieved_error) {}
  double achieved_error() const { return achieved_; }

 private:
  double achieved_;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  bool converged = false;
  std::size_t evaluations = 0;
};

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGk15WeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
QuadResult gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  double fc = f(c);
  double kron = kGk15WeightsK[7] * fc;
  double gauss = kGk15WeightsG[3] * fc;
  double resabs = kGk15WeightsK[7] * std::fabs(fc);
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kGk15Nodes[i];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    fv[2 * i] = f1;
    fv[2 * i + 1] = f2;
    kron += kGk15WeightsK[i] * (f1 + f2);
    resabs += kGk15WeightsK[i] * (std::fabs(f1) + std::fabs(f2));
    if (i % 2 == 1) gauss += kGk15WeightsG[i / 2] * (f1 + f2);
  }
  const double mean = 0.5 * kron;
  double resasc = kGk15WeightsK[7] * std::fabs(fc - mean);
  for (int i = 0; i < 7; ++i)
    resasc += kGk15WeightsK[i] *
              (std::fabs(fv[2 * i] - mean) + std::fabs(fv[2 * i + 1] - mean));
  resasc *= std::fabs(h);
  resabs *= std::fabs(h);

  QuadResult r;
  r.value = kron * h;
  r.evaluations = 15;
  double err = std::fabs((kron - gauss) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double round = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  r.error = std::max(err, round);
  return r;
}

struct Segment {
  double a, b, value, error;
};

}  // namespace detail

// Globally adaptive bisection on [a,b], worst-error-first.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  QuadResult total;
  if (a == b) {
    total.converged = true;
    return total;
  }
  std::vector<detail::Segment> segs;
  auto first = detail::gk15(f, a, b);
  total.evaluations = first.evaluations;
  segs.push_back({a, b, first.value, first.error});

  auto seg_cmp = [](const detail::Segment& s1, const detail::Segment& s2) {
    return s1.error < s2.error;
  };

  double sum = first.value;
  double err = first.error;
  for (int iter = 0; iter < opt.max_intervals; ++iter) {
    if (err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(sum))) break;
    std::pop_heap(segs.begin(), segs.end(), seg_cmp);
    detail::Segment worst = segs.back();
    segs.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval exhausted at machine precision
      segs.push_back(worst);
      std::push_heap(segs.begin(), segs.end(), seg_cmp);
      break;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total.evaluations += left.evaluations + right.evaluations;
    sum += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    segs.push_back({worst.a, mid, left.value, left.error});
    std::push_heap(segs.begin(), segs.end(), seg_cmp);
    segs.push_back({mid, worst.b, right.value, right.error});
    std::push_heap(segs.begin(), segs.end(), seg_cmp);
  }
  // re-accumulate from the segments to shed the incremental rounding
  sum = 0.0;
  err = 0.0;
  for (const auto& s : segs) {
    sum += s.value;
    err += s.error;
  }
  total.value = sum;
  total.error = err;
  total.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(sum));
  return total;
}

// Integrate over [pts.front(), pts.back()] split at the interior points.
template <class F>
QuadResult integrate_split(F&& f, const std::vector<double>& pts,
                           const QuadOptions& opt = {}) {
  QuadResult total;
  total.converged = true;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    QuadOptions sub = opt;
    sub.abs_tol = opt.abs_tol / std::max<std::size_t>(1, pts.size() - 1);
    auto r = integrate(f, pts[i], pts[i + 1], sub);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
    total.converged = total.converged && r.converged;
  }
  return total;
}

// Semi-infinite integral by doubling blocks: [a, a+w], [a+w, a+3w], ...
// Stops once two consecutive blocks contribute below tolerance.
template <class F>
QuadResult integrate_semi_inf(F&& f, double a, const QuadOptions& opt = {},
                              double first_width = 1.0, int max_blocks = 64) {
  QuadResult total;
  double lo = a;
  double w = first_width;
  int quiet = 0;
  for (int blk = 0; blk < max_blocks; ++blk) {
    auto r = integrate(f, lo, lo + w, opt);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
    if (!r.converged) {
      total.converged = false;
      return total;
    }
    const double target =
        std::max(opt.abs_tol, opt.rel_tol * std::fabs(total.value));
    quiet = (std::fabs(r.value) <= 0.25 * target) ? quiet + 1 : 0;
    if (quiet >= 2) {
      total.converged = true;
      return total;
    }
    lo += w;
    w *= 2.0;
  }
  total.converged = false;
  return total;
}

// Raise QuadratureError unless the result converged.
inline double require_converged(const QuadResult& r, const char* context) {
  if (!r.converged)
    throw QuadratureError(std::string(context) +
                              ": quadrature failed to converge (error "
                              "estimate " +
                              std::to_string(r.error) + ")",
                          r.error);
  return r.value;
}

// Chebyshev interpolant of a smooth function on [lo,hi]; degree grows until
// the trailing coefficients drop below tol.
class ChebyshevFit {
 public:
  template <class F>
  ChebyshevFit(F&& f, double lo, double hi, double tol = 1e-12,
               int max_nodes = 257)
      : lo_(lo), hi_(hi) {
    int n = 17;
    while (true) {
      fit(f, n);
      double scale = 0.0;
      for (double c : coef_) scale = std::max(scale, std::fabs(c));
      double tail = 0.0;
      for (std::size_t k = coef_.size() - 3; k < coef_.size(); ++k)
        tail = std::max(tail, std::fabs(coef_[k]));
      if (tail <= tol * std::max(1.0, scale)) {
        converged_ = true;
        break;
      }
      if (n >= max_nodes) break;
      n = 2 * n - 1;
    }
  }

  double operator()(double x) const {
    const double u = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
    double b0 = 0.0, b1 = 0.0;
    for (std::size_t k = coef_.size(); k-- > 1;) {
      const double b2 = b1;
      b1 = b0;
      b0 = 2.0 * u * b1 - b2 + coef_[k];
    }
    return u * b0 - b1 + coef_[0];
  }

  bool converged() const { return converged_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  template <class F>
  void fit(F&& f, int n) {
    const double pi = 3.14159265358979323846;
    std::vector<double> fx(n);
    for (int j = 0; j < n; ++j) {
      const double theta = pi * (j + 0.5) / n;
      const double u = std::cos(theta);
      fx[j] = f(0.5 * (lo_ + hi_) + 0.5 * (hi_ - lo_) * u);
    }
    coef_.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        s += fx[j] * std::cos(pi * k * (j + 0.5) / n);
      coef_[k] = 2.0 * s / n;
    }
    coef_[0] *= 0.5;
  }

  double lo_, hi_;
  std::vector<double> coef_;
  bool converged_ = false;
};

}  // namespace fracflow

#endif  // FRACFLOW_QUADRATURE_HPP
