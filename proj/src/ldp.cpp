#include "sconv/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sconv/errors.hpp"
#include "sconv/numeric.hpp"

namespace sconv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Support points within this distance of a boundary count as on it.
double edge_tol(double x) { return 1e-12 * std::max(1.0, std::abs(x)); }

}  // namespace

WeightedSampleSequence::WeightedSampleSequence(Generator gen, std::function<double(int)> scale, std::string name)
    : gen_(std::move(gen)), scale_(std::move(scale)), name_(std::move(name)) {}

WeightedSample WeightedSampleSequence::sample(int n) const {
  if (n < 1) throw DomainError("sample sizes must be positive");
  WeightedSample s = gen_(n);
  if (s.y.size() != s.log_w.size()) throw DataError("support and weights differ in length");
  return s;
}

WeightedSampleSequence binomial_mean_sequence(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("binomial parameter must lie in (0,1)");
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  auto gen = [lp, lq](int n) {
    WeightedSample s;
    s.y.reserve(static_cast<std::size_t>(n) + 1);
    s.log_w.reserve(static_cast<std::size_t>(n) + 1);
    const double lg_n = std::lgamma(n + 1.0);
    for (int k = 0; k <= n; ++k) {
      s.y.push_back(static_cast<double>(k) / n);
      s.log_w.push_back(lg_n - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq);
    }
    return s;
  };
  return WeightedSampleSequence(gen, [](int n) { return static_cast<double>(n); },
                                "binomial(" + std::to_string(p) + ")");
}

WeightedSampleSequence llr_sequence(std::function<ClassicalPair(int)> pairs, LlrMeasure measure,
                                    std::string name) {
  auto gen = [pairs = std::move(pairs), measure](int n) {
    const ClassicalPair cp = pairs(n);
    WeightedSample s;
    for (std::size_t k = 0; k < cp.size(); ++k) {
      const double lp = cp.log_p[k];
      const double lq = cp.log_q[k];
      if (!std::isfinite(lp) || !std::isfinite(lq)) continue;
      s.y.push_back((lp - lq) / n);
      s.log_w.push_back((measure == LlrMeasure::alternative ? lq : lp) + cp.log_mult[k]);
    }
    return s;
  };
  return WeightedSampleSequence(gen, [](int n) { return static_cast<double>(n); }, std::move(name));
}

double log_mgf(const WeightedSample& s, double t) {
  if (s.y.empty()) throw DomainError("log-MGF of an empty support");
  std::vector<double> terms(s.y.size());
  for (std::size_t i = 0; i < s.y.size(); ++i) terms[i] = s.log_w[i] + t * s.y[i];
  return log_sum_exp(terms);
}

double log_mgf(const WeightedSampleSequence& seq, int n, double t) { return log_mgf(seq.sample(n), t); }

double normalized_log_mgf(const WeightedSampleSequence& seq, int n, double t) {
  const double c = seq.scale(n);
  return log_mgf(seq.sample(n), c * t) / c;
}

double exact_tail_rate(const WeightedSample& s, double scale, double x, TailSide side) {
  std::vector<double> terms;
  const double tol = edge_tol(x);
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const bool inside = side == TailSide::upper ? s.y[i] >= x - tol : s.y[i] <= x + tol;
    if (inside) terms.push_back(s.log_w[i]);
  }
  return log_sum_exp(terms) / scale;
}

double exact_tail_rate(const WeightedSampleSequence& seq, int n, double x, TailSide side) {
  return exact_tail_rate(seq.sample(n), seq.scale(n), x, side);
}

double window_rate(const WeightedSample& s, double scale, double lo, double hi) {
  std::vector<double> terms;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    if (s.y[i] > lo + edge_tol(lo) && s.y[i] < hi - edge_tol(hi)) terms.push_back(s.log_w[i]);
  }
  return log_sum_exp(terms) / scale;
}

RateCurve RateCurve::closed_form(std::function<double(double)> lambda_bar, std::string name) {
  return RateCurve(std::move(lambda_bar), std::move(name));
}

RateCurve RateCurve::from_sequence(const WeightedSampleSequence& seq, std::vector<int> n_list) {
  if (n_list.size() < 2) throw DomainError("extrapolating the log-MGF needs two sample sizes");
  std::sort(n_list.begin(), n_list.end());
  const int n1 = n_list[n_list.size() - 2];
  const int n2 = n_list.back();
  const WeightedSample s1 = seq.sample(n1);
  const WeightedSample s2 = seq.sample(n2);
  const double c1 = seq.scale(n1);
  const double c2 = seq.scale(n2);
  // L(c) = L + b/c through the two largest sizes.
  auto fn = [s1, s2, c1, c2](double t) {
    const double l1 = log_mgf(s1, c1 * t) / c1;
    const double l2 = log_mgf(s2, c2 * t) / c2;
    return (c2 * l2 - c1 * l1) / (c2 - c1);
  };
  return RateCurve(fn, seq.name() + " (Richardson, n=" + std::to_string(n1) + "," + std::to_string(n2) + ")");
}

double RateCurve::derivative(double t, double h) const { return (fn_(t + h) - fn_(t - h)) / (2.0 * h); }

double RateCurve::legendre(double x, double t_lo, double t_hi) const {
  const auto obj = [&](double t) { return t * x - fn_(t); };
  return golden_section_max(obj, t_lo, t_hi, 1e-12).value;
}

double chernoff_upper(const RateCurve& curve, double x, double t_max, TailSide side) {
  if (!(t_max > 0.0)) throw DomainError("Chernoff search range must be positive");
  const double lo = side == TailSide::upper ? 0.0 : -t_max;
  const double hi = side == TailSide::upper ? t_max : 0.0;
  const auto obj = [&](double t) { return t * x - curve.lambda_bar(t); };
  // Coarse scan first: the objective is concave, so the best grid cell
  // brackets the maximiser.
  const int cells = 200;
  int best = 0;
  double best_val = obj(lo);
  for (int i = 1; i <= cells; ++i) {
    const double v = obj(lo + (hi - lo) * i / cells);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = lo + (hi - lo) * std::max(0, best - 1) / cells;
  const double b = lo + (hi - lo) * std::min(cells, best + 1) / cells;
  const Maximum m = golden_section_max(obj, a, b, 1e-13);
  return -std::max({0.0, best_val, m.value});
}

double mgf_convexity_violation(const WeightedSampleSequence& seq, int n, const std::vector<double>& t_grid) {
  const WeightedSample s = seq.sample(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    for (std::size_t j = i + 1; j < t_grid.size(); ++j) {
      const double mid = log_mgf(s, 0.5 * (t_grid[i] + t_grid[j]));
      const double chord = 0.5 * (log_mgf(s, t_grid[i]) + log_mgf(s, t_grid[j]));
      worst = std::max(worst, mid - chord);
    }
  }
  return worst;
}

LowerBoundVerdict gartner_ellis_lower_check(const WeightedSampleSequence& seq, double x,
                                            std::pair<double, double> window,
                                            std::pair<double, double> t_range, const std::vector<int>& n_list,
                                            const LowerBoundOptions& opts) {
  const auto [x0, x1] = window;
  const auto [t_lo, t_hi] = t_range;
  if (!(x0 < x1) || x < x0 || x >= x1) throw DomainError("x must lie in the window [x0, x1)");
  if (!(t_lo < t_hi)) throw DomainError("empty t range");
  if (n_list.size() < 3) throw DomainError("the Cauchy gate needs at least three sample sizes");
  std::vector<int> ns = n_list;
  std::sort(ns.begin(), ns.end());

  LowerBoundVerdict out;
  out.x = x;

  // Cauchy gate on the last three sizes.
  std::vector<WeightedSample> last;
  std::vector<double> scales;
  for (std::size_t k = ns.size() - 3; k < ns.size(); ++k) {
    last.push_back(seq.sample(ns[k]));
    scales.push_back(seq.scale(ns[k]));
  }
  for (int g = 0; g < opts.grid_points; ++g) {
    const double t = t_lo + (t_hi - t_lo) * g / (opts.grid_points - 1);
    double prev = log_mgf(last[0], scales[0] * t) / scales[0];
    for (std::size_t k = 1; k < last.size(); ++k) {
      const double cur = log_mgf(last[k], scales[k] * t) / scales[k];
      out.cauchy_gap = std::max(out.cauchy_gap, std::abs(cur - prev));
      prev = cur;
    }
  }
  if (out.cauchy_gap > opts.cauchy_tol) {
    throw DataError("normalized log-MGF has not converged: successive differences reach " +
                    std::to_string(out.cauchy_gap));
  }

  const RateCurve curve = RateCurve::from_sequence(seq, ns);
  const double h = 1e-5;
  const double d_lo = curve.derivative(t_lo + h, h);
  const double d_hi = curve.derivative(t_hi - h, h);
  if (!(x > d_lo && x < d_hi)) {
    throw DomainError("x lies outside the range of the log-MGF derivative on the t interval");
  }
  const auto root = [&](double target) {
    return bisect_increasing([&](double t) { return curve.derivative(t, h) - target; }, t_lo + h, t_hi - h,
                             1e-13);
  };
  out.t_x = root(x);
  out.lambda_at_tx = curve.lambda_bar(out.t_x);
  out.legendre_x = curve.legendre(x, t_lo, t_hi);

  // Duality residual over the smooth range.
  for (int g = 1; g + 1 < opts.grid_points; ++g) {
    const double t = t_lo + (t_hi - t_lo) * g / (opts.grid_points - 1);
    const double slope = curve.derivative(t, h);
    const double res = curve.legendre(slope, t_lo, t_hi) + curve.lambda_bar(t) - t * slope;
    out.duality_residual = std::max(out.duality_residual, std::abs(res));
  }

  for (int n : ns) {
    const WeightedSample s = seq.sample(n);
    LowerBoundRow row;
    row.n = n;
    row.window_rate = window_rate(s, seq.scale(n), x, x1);
    row.margin = row.window_rate + out.legendre_x;
    out.rows.push_back(row);
  }
  out.margins_shrinking = true;
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    if (std::abs(out.rows[k].margin) > std::abs(out.rows[k - 1].margin) + 1e-12) out.margins_shrinking = false;
  }

  // Tilt the largest measure to y = x + delta/2 and weigh (x, x + delta).
  out.delta = opts.delta_fraction * (x1 - x0);
  const double y = x + 0.5 * out.delta;
  const double t_y = y < d_hi ? root(y) : t_hi;
  const WeightedSample& big = last.back();
  const double c = scales.back();
  WeightedSample tilted = big;
  for (std::size_t i = 0; i < tilted.y.size(); ++i) tilted.log_w[i] += c * t_y * tilted.y[i];
  const double total = log_sum_exp(tilted.log_w);
  out.tilted_mass = std::exp(window_rate(tilted, 1.0, x, x + out.delta) - total);
  return out;
}

}  // namespace sconv
