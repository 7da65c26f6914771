#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sconv/classical.hpp"

namespace sconv {

// Finite support of mu_n with weights kept as logs.
struct WeightedSample {
  std::vector<double> y;
  std::vector<double> log_w;
};

// A sequence of finite positive measures mu_n together with the scale c_n.
class WeightedSampleSequence {
 public:
  using Generator = std::function<WeightedSample(int n)>;

  WeightedSampleSequence(Generator gen, std::function<double(int)> scale, std::string name = {});

  WeightedSample sample(int n) const;
  double scale(int n) const { return scale_(n); }
  const std::string& name() const { return name_; }

 private:
  Generator gen_;
  std::function<double(int)> scale_;
  std::string name_;
};

// Law of the mean of n Bernoulli(p) draws, c_n = n.
WeightedSampleSequence binomial_mean_sequence(double p);

enum class LlrMeasure { null_state, alternative };

// Y_n = (1/n) log(p_n/q_n) of the classical pairs produced by `pairs`,
// distributed under q_n (alternative) or p_n (null_state); c_n = n.
// Under q_n, Lambda_n(n t) = psi(t | p_n || q_n); under p_n it is psi(1 + t).
WeightedSampleSequence llr_sequence(std::function<ClassicalPair(int)> pairs, LlrMeasure measure,
                                    std::string name = {});

// log sum_i w_i e^{t y_i}. Throws DomainError on an empty support.
double log_mgf(const WeightedSample& s, double t);
double log_mgf(const WeightedSampleSequence& seq, int n, double t);

// (1/c_n) Lambda_n(c_n t).
double normalized_log_mgf(const WeightedSampleSequence& seq, int n, double t);

// (1/c_n) log mu_n([x, inf)) (upper) or (1/c_n) log mu_n((-inf, x]) (lower).
enum class TailSide { upper, lower };
double exact_tail_rate(const WeightedSampleSequence& seq, int n, double x, TailSide side = TailSide::upper);
double exact_tail_rate(const WeightedSample& s, double scale, double x, TailSide side = TailSide::upper);

// (1/c_n) log mu_n((lo, hi)), open interval.
double window_rate(const WeightedSample& s, double scale, double lo, double hi);

// Limiting normalized log-MGF: either supplied in closed form or taken from
// the two largest sample sizes with one Richardson step in 1/c_n.
class RateCurve {
 public:
  static RateCurve closed_form(std::function<double(double)> lambda_bar, std::string name = {});
  static RateCurve from_sequence(const WeightedSampleSequence& seq, std::vector<int> n_list);

  double lambda_bar(double t) const { return fn_(t); }
  // Central difference with step h.
  double derivative(double t, double h = 1e-5) const;
  // sup over t in [t_lo, t_hi] of t x - lambda_bar(t).
  double legendre(double x, double t_lo, double t_hi) const;
  const std::string& name() const { return name_; }

 private:
  RateCurve(std::function<double(double)> fn, std::string name) : fn_(std::move(fn)), name_(std::move(name)) {}
  std::function<double(double)> fn_;
  std::string name_;
};

// Upper-tail bound -sup_{0 <= t <= t_max} (t x - lambda_bar(t)); the lower
// side uses -t_max <= t <= 0. Always <= 0 since t = 0 is admissible.
double chernoff_upper(const RateCurve& curve, double x, double t_max = 50.0, TailSide side = TailSide::upper);

// Largest violation of midpoint convexity of t -> Lambda_n(t) on a grid.
double mgf_convexity_violation(const WeightedSampleSequence& seq, int n, const std::vector<double>& t_grid);

struct LowerBoundRow {
  int n = 0;
  double window_rate = 0.0;  // (1/c_n) log mu_n((x, x1))
  double margin = 0.0;       // window_rate + legendre(x)
};

struct LowerBoundVerdict {
  double x = 0.0;
  double t_x = 0.0;
  double lambda_at_tx = 0.0;
  double legendre_x = 0.0;  // Lambda-bar*(x)
  double cauchy_gap = 0.0;  // largest successive difference over the last three n
  double duality_residual = 0.0;
  double delta = 0.0;
  double tilted_mass = 0.0;  // tilted measure of (x, x + delta) at the largest n
  std::vector<LowerBoundRow> rows;
  bool margins_shrinking = false;
};

struct LowerBoundOptions {
  double cauchy_tol = 1e-3;
  // Tilted-window width as a fraction of the window (x0, x1).
  double delta_fraction = 0.2;
  int grid_points = 41;
};

// Verifies the Gartner-Ellis lower bound at x. Throws DataError when the
// normalized log-MGF fails the Cauchy gate on t_range and DomainError when x
// lies outside (Lambda-bar'(t_lo), Lambda-bar'(t_hi)).
LowerBoundVerdict gartner_ellis_lower_check(const WeightedSampleSequence& seq, double x,
                                            std::pair<double, double> window,
                                            std::pair<double, double> t_range, const std::vector<int>& n_list,
                                            const LowerBoundOptions& opts = {});

}  // namespace sconv
