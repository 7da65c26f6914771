#include "sconv/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sconv/errors.hpp"

namespace sconv {

double log_sum_exp(const double* x, std::size_t n) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) top = std::max(top, x[i]);
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Kahan summation keeps long tails accurate.
    const double y = std::exp(x[i] - top) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return top + std::log(sum);
}

double log_sum_exp(const std::vector<double>& x) { return log_sum_exp(x.data(), x.size()); }

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (!std::isfinite(b)) return a;
  return a + std::log1p(std::exp(b - a));
}

Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Maximum best{0.5 * (a + b), f(0.5 * (a + b))};
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

double bisect_increasing(const std::function<double(double)>& f, double lo, double hi, double tol,
                         int max_iter) {
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("least squares needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw DomainError("least squares needs two distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.rms_residual = std::sqrt(sse / static_cast<double>(n));
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

}  // namespace sconv
