#include "sconv/hoeffding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sconv/errors.hpp"
#include "sconv/numeric.hpp"

namespace sconv {

namespace {

constexpr double kTailSlopeTol = 1e-8;
constexpr double kSearchCap = 1e6;
constexpr double kPolarTol = 1e-10;

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::zero:
      return "zero";
    case Regime::interior:
      return "interior";
    case Regime::linear_tail:
      return "linear_tail";
  }
  return "unknown";
}

PolarValue polar(const ConvexRate& f, double a) {
  PolarValue out;
  if (a <= f.right_derivative_at_1()) return out;
  const auto a_max = f.slope_at_infinity();
  if (a_max && a > *a_max) {
    out.infinite = true;
    out.value = std::numeric_limits<double>::infinity();
    out.t_star = std::numeric_limits<double>::infinity();
    out.tail_dominated = true;
    return out;
  }
  auto g = [&](double t) { return a * (t - 1.0) - f(t); };

  if (f.sampled()) {
    // Concave and piecewise linear: the supremum sits on a node.
    const auto& ts = f.node_t();
    const auto& fs = f.node_f();
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double v = a * (ts[k] - 1.0) - fs[k];
      if (v > out.value) {
        out.value = v;
        out.t_star = ts[k];
      }
    }
    out.tail_dominated = out.t_star == ts.back() && a_max && a == *a_max;
    return out;
  }

  auto rising = [&](double t) {
    const double h = 1e-3 * t;
    return (g(t) - g(t - h)) / h > kTailSlopeTol;
  };
  double hi = f.t_hi();
  if (rising(hi)) {
    out.tail_dominated = true;
    while (hi < kSearchCap && rising(hi)) hi = std::min(2.0 * hi, kSearchCap);
    if (rising(hi) && a_max && a >= *a_max) {
      out.infinite = true;
      out.value = std::numeric_limits<double>::infinity();
      out.t_star = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  const Maximum m = golden_section_max(g, 1.0, hi, kPolarTol);
  out.value = std::max(m.value, 0.0);
  out.t_star = m.arg;
  return out;
}

std::optional<double> r_max(const ConvexRate& f) {
  const auto a_max = f.slope_at_infinity();
  if (!a_max) return std::nullopt;
  const PolarValue p = polar(f, *a_max);
  if (p.infinite) return std::nullopt;
  return p.value + *a_max;
}

HoeffdingResult hoeffding_anti(const ConvexRate& f, double r) {
  if (!(r >= 0.0)) throw DomainError("Hoeffding anti-divergence needs r >= 0");
  HoeffdingResult out;
  out.r = r;
  const double a_min = f.right_derivative_at_1();
  if (r <= a_min + 1e-9) {
    out.regime = Regime::zero;
    out.value = 0.0;
    out.a_r = r;
    out.attaining_t = 1.0;
    return out;
  }
  const auto a_max = f.slope_at_infinity();
  const auto threshold = r_max(f);
  if (threshold && r >= *threshold) {
    out.regime = Regime::linear_tail;
    out.value = r - *a_max;
    out.a_r = *a_max;
    return out;
  }
  const double hi = a_max ? std::min(r, *a_max) : r;
  auto excess = [&](double a) { return polar(f, a).value + a - r; };
  const double a_r = bisect_increasing(excess, a_min, hi, 1e-13 * std::max(1.0, std::abs(r)));
  const PolarValue p = polar(f, a_r);
  out.regime = Regime::interior;
  out.a_r = a_r;
  out.value = p.value;
  out.attaining_t = p.t_star;
  return out;
}

double sc_lower_bound_curve(const ConvexRate& f, double r) {
  if (!(r >= 0.0)) throw DomainError("strong converse lower bound needs r >= 0");
  auto objective = [&](double s) { return s * r - (1.0 - s) * f(1.0 / (1.0 - s)); };
  const Maximum m = golden_section_max(objective, 0.0, 1.0 - 1e-9, 1e-12);
  return std::max(m.value, 0.0);
}

RateFit rate_from_samples(const std::vector<double>& alphas, const std::vector<std::vector<PsiSample>>& samples,
                          double scaling_exponent, double projection_tol) {
  if (alphas.size() != samples.size() || alphas.empty()) {
    throw ValidationError("one sample series per alpha is required", "alphas");
  }
  RateFit fit;
  fit.alphas = alphas;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    auto series = samples[k];
    if (series.size() < 3) throw ValidationError("at least three sample sizes per alpha", "samples");
    std::sort(series.begin(), series.end(), [](const PsiSample& x, const PsiSample& y) { return x.n < y.n; });
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& s : series) {
      if (s.n <= 0) throw ValidationError("sample sizes must be positive", "samples");
      x.push_back(1.0 / s.n);
      y.push_back(s.psi / std::pow(s.n, scaling_exponent));
    }
    const LinearFit lf = least_squares(x, y);
    fit.psi_bar.push_back(lf.intercept);
    fit.residuals.push_back(lf.rms_residual);
    fit.corrections.push_back(std::abs(lf.intercept - y.back()));
  }
  fit.rate = ConvexRate::from_samples(alphas, fit.psi_bar, projection_tol, "extrapolated samples");
  return fit;
}

}  // namespace sconv
