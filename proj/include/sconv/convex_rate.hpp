#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sconv {

struct ConvexityReport {
  double f_at_1 = 0.0;
  double midpoint_violation = 0.0;  // max of f((s+t)/2) - (f(s)+f(t))/2 over the grid
  double chord_violation = 0.0;     // max decrease of (f(t)-f(1))/(t-1) along the grid
  bool ok = true;
};

// A convex f on [1, inf) with f(1) = 0, given either as a closure or as
// extrapolated samples joined piecewise linearly. a_min is the right
// derivative at 1 and a_max the slope at infinity (absent means +inf).
class ConvexRate {
 public:
  static ConvexRate analytic(std::function<double(double)> f, double right_derivative_at_1,
                             std::optional<double> slope_at_infinity, std::string name = "analytic",
                             double t_hi = 64.0);

  // Nodes (alpha_k, value_k) with alpha_k > 1; the node (1, 0) is implied.
  // Convexity violations up to projection_tol are projected onto the lower
  // convex hull; larger ones raise DataError naming the offending triple.
  // Past the last node the curve continues along its final chord.
  static ConvexRate from_samples(const std::vector<double>& alphas, const std::vector<double>& values,
                                 double projection_tol = 1e-6, std::string name = "samples");

  double operator()(double t) const;
  double right_derivative_at_1() const { return a_min_; }
  std::optional<double> slope_at_infinity() const { return a_max_; }
  double t_hi() const { return t_hi_; }
  bool sampled() const { return !node_t_.empty(); }
  const std::vector<double>& node_t() const { return node_t_; }
  const std::vector<double>& node_f() const { return node_f_; }
  double projection_shift() const { return projection_shift_; }
  const std::string& name() const { return name_; }

  // f(1), midpoint convexity and chord monotonicity on a uniform grid of
  // 2^levels intervals over [1, t_hi].
  ConvexityReport check(int levels = 6, double tol = 1e-8) const;

 private:
  ConvexRate() = default;
  std::function<double(double)> f_;
  double a_min_ = 0.0;
  std::optional<double> a_max_;
  double t_hi_ = 64.0;
  std::vector<double> node_t_;
  std::vector<double> node_f_;
  double projection_shift_ = 0.0;
  std::string name_;
};

}  // namespace sconv
