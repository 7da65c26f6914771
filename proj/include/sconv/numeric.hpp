#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sconv {

// log sum_i exp(x_i); -inf entries contribute nothing. Returns -inf for an
// empty or all -inf input.
double log_sum_exp(const double* x, std::size_t n);
double log_sum_exp(const std::vector<double>& x);

// log(exp(a) + exp(b)).
double log_add(double a, double b);

struct Maximum {
  double arg = 0.0;
  double value = 0.0;
};

// Golden-section search for the maximum of a unimodal function on [lo, hi].
Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol);

// Bisection for a sign change of an increasing function on [lo, hi].
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi, double tol,
                         int max_iter = 200);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 1.0;
  double rms_residual = 0.0;
};

// Ordinary least squares y = intercept + slope * x. Needs two distinct x.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sconv
