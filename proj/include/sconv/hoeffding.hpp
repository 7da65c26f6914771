#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sconv/convex_rate.hpp"

namespace sconv {

struct PolarValue {
  double value = 0.0;
  bool infinite = false;
  double t_star = 1.0;          // maximiser (or the search cap when unbounded)
  bool tail_dominated = false;  // objective still rising at t_hi
};

// f°(a) = sup_{t>1} { a(t-1) - f(t) }.
PolarValue polar(const ConvexRate& f, double a);

enum class Regime { zero, interior, linear_tail };
std::string to_string(Regime r);

struct HoeffdingResult {
  double r = 0.0;
  double value = 0.0;
  Regime regime = Regime::zero;
  std::optional<double> a_r;
  std::optional<double> attaining_t;
};

// H*_{f,r} = sup_{t>1} (r(t-1) - f(t))/t, resolved by regime.
HoeffdingResult hoeffding_anti(const ConvexRate& f, double r);

// f°(a_max) + a_max; absent when a_max or f°(a_max) is infinite.
std::optional<double> r_max(const ConvexRate& f);

// sup over s in (0,1) of s r - (1-s) f(1/(1-s)): the same quantity as
// hoeffding_anti, reached through the measured-divergence lower bound.
double sc_lower_bound_curve(const ConvexRate& f, double r);

struct PsiSample {
  double n = 0.0;
  double psi = 0.0;
};

struct RateFit {
  std::vector<double> alphas;
  std::vector<double> psi_bar;      // extrapolated limits c in psi_n/n^s = c + d/n
  std::vector<double> residuals;    // rms residual of each fit
  std::vector<double> corrections;  // |c - psi_N/N^s| at the largest N
  std::optional<ConvexRate> rate;
};

// One Richardson step per alpha, then a convex piecewise-linear rate through
// the extrapolated values.
RateFit rate_from_samples(const std::vector<double>& alphas, const std::vector<std::vector<PsiSample>>& samples,
                          double scaling_exponent, double projection_tol = 1e-6);

}  // namespace sconv
