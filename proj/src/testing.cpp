#include "sconv/testing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sconv/classical.hpp"
#include "sconv/errors.hpp"
#include "sconv/numeric.hpp"
#include "sconv/parallel.hpp"

namespace sconv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

double clamp_unit(double x) {
  if (x < 0.0 && x > -1e-10) return 0.0;
  if (x > 1.0 && x < 1.0 + 1e-10) return 1.0;
  return x;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// Everything computed at one block size.
struct Point {
  ErrorPair errors;
  double log_alpha = 0.0;
  double log_positive_part = kNegInf;
  std::vector<double> psi_star;  // sandwiched psi_n at the bound alphas
  double commutator = 0.0;       // ||[T, sigma_n]|| for matrix pinched tests
};

void validate_n_list(const std::vector<int>& n_list) {
  if (n_list.empty()) throw ValidationError("n_list must be nonempty", "n_list");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw ValidationError("block sizes must be positive", "n_list");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ValidationError("n_list must be strictly increasing", "n_list");
  }
}

std::string choose_route(const StateFamilySpec& spec, SweepMode mode) {
  if (family_commuting(spec)) return "classical";
  if (mode == SweepMode::pinched && spec.kind == FamilyKind::iid) return "pinched-classical";
  return "matrix";
}

// Error data of the (possibly scaled) NP or pinched NP test at one n.
Point evaluate_point(const StateFamilySpec& spec, int n, double a, double shift, SweepMode mode,
                     const std::string& route, const SweepOptions& opts) {
  Point pt;
  const double c = np_threshold(n, a, spec.scaling_exponent);
  const double scale_log = -np_threshold(n, shift, spec.scaling_exponent);
  pt.errors.n = n;
  pt.errors.a = a;
  if (route == "matrix") {
    const StatePair pair = family_states(spec, n, opts.dim_cap);
    const HermitianOperator& rho = pair.rho();
    const HermitianOperator& sigma = pair.sigma();
    const HermitianOperator target = mode == SweepMode::np ? rho : pinch(rho, sigma);
    // Same rescaling as np_test, so one eigendecomposition serves the test,
    // its error traces and the positive part.
    const double log_scale = c > 0.0 ? -c : 0.0;
    const HermitianOperator diff(std::exp(log_scale) * target.matrix() - std::exp(c + log_scale) * sigma.matrix());
    const RealVector& lam = diff.eigenvalues();
    const double zero_tol = 1e-12 * std::max(diff.norm(), 1.0);
    Eigen::Index first = 0;
    while (first < lam.size() && lam(first) <= zero_tol) ++first;
    const Eigen::Index k = lam.size() - first;
    const Matrix v = diff.eigenvectors().rightCols(k);
    const double factor = std::exp(scale_log);
    const double success = factor * (rho.matrix() * v).cwiseProduct(v.conjugate()).sum().real();
    const double beta = factor * (sigma.matrix() * v).cwiseProduct(v.conjugate()).sum().real();
    if (mode == SweepMode::pinched) {
      const Matrix proj = v * v.adjoint();
      pt.commutator = (proj * sigma.matrix() - sigma.matrix() * proj).cwiseAbs().maxCoeff();
    }
    pt.errors.success = clamp_unit(success);
    pt.errors.alpha_err = clamp_unit(rho.trace() - success);
    pt.errors.beta_err = clamp_unit(beta);
    pt.errors.log_success = safe_log(pt.errors.success);
    pt.errors.log_beta = safe_log(pt.errors.beta_err);
    pt.log_alpha = safe_log(pt.errors.alpha_err);
    double pos = 0.0;
    for (Eigen::Index i = first; i < lam.size(); ++i) pos += lam(i);
    pt.log_positive_part = safe_log(pos) - log_scale + scale_log;
    if (mode == SweepMode::pinched) {
      // The NP sandwich is stated for rho itself.
      const double mult = std::exp(std::min(c, 700.0));
      pt.log_positive_part = safe_log(positive_part_trace(HermitianOperator(rho.matrix() - mult * sigma.matrix()))) +
                             scale_log;
    }
    if (spec.kind == FamilyKind::gibbs) {
      const RenyiEvaluator ev(pair);
      for (double al : opts.bound_alphas) pt.psi_star.push_back(ev.psi(al, RenyiVariant::sandwiched));
    } else {
      for (double al : opts.bound_alphas) {
        const ExtendedReal psi = family_psi_n(spec, al, n, RenyiVariant::sandwiched, opts.dim_cap);
        pt.psi_star.push_back(psi.infinite ? std::numeric_limits<double>::infinity() : psi.value);
      }
    }
    return pt;
  }
  const ClassicalPair cp = family_classical(spec, n, mode == SweepMode::pinched, opts.dim_cap);
  const ClassicalErrors e = np_errors(cp, c);
  pt.errors.log_success = e.log_success + scale_log;
  pt.errors.log_beta = e.log_beta + scale_log;
  pt.errors.success = clamp_unit(std::exp(pt.errors.log_success));
  pt.errors.beta_err = clamp_unit(std::exp(pt.errors.log_beta));
  if (shift > 0.0) {
    // Scaling the test leaves 1 - scale * Tr rho S in the type-I error.
    pt.log_alpha = safe_log(1.0 - pt.errors.success);
    pt.errors.alpha_err = clamp_unit(1.0 - pt.errors.success);
  } else {
    pt.log_alpha = e.log_alpha;
    pt.errors.alpha_err = clamp_unit(std::exp(e.log_alpha));
  }
  pt.log_positive_part = e.log_positive_part + scale_log;
  for (double al : opts.bound_alphas) {
    const ExtendedReal psi = family_psi_n(spec, al, n, RenyiVariant::sandwiched, opts.dim_cap);
    pt.psi_star.push_back(psi.infinite ? std::numeric_limits<double>::infinity() : psi.value);
  }
  return pt;
}

void add_check(ExponentReport& rep, const std::string& name, bool ok, const std::string& detail) {
  rep.checks.push_back({name, ok, detail});
}

// Fills per_n, fits and the finite-n invariant checks.
void run_points(ExponentReport& rep, const StateFamilySpec& spec, double a, double shift,
                const std::vector<int>& n_list, SweepMode mode, const SweepOptions& opts) {
  rep.route = choose_route(spec, mode);
  std::vector<Point> points(n_list.size());
  parallel_for(n_list.size(), opts.threads, [&](std::size_t i) {
    points[i] = evaluate_point(spec, n_list[i], a, shift, mode, rep.route, opts);
  });

  bool total_ok = true;
  bool sandwich_ok = true;
  bool upper_ok = true;
  bool measured_ok = true;
  bool commute_ok = true;
  std::string first_failure;
  std::vector<double> xs;
  std::vector<double> ls;
  std::vector<double> lb;
  for (const Point& pt : points) {
    const ErrorPair& e = pt.errors;
    rep.per_n.push_back(e);
    const double c = np_threshold(e.n, a, spec.scaling_exponent);
    // Type-I error and success add up to one.
    const double total = std::exp(pt.log_alpha) + e.success;
    if (std::abs(total - 1.0) > 1e-10) {
      total_ok = false;
      if (first_failure.empty()) first_failure = "n=" + std::to_string(e.n) + " alpha+success=" + fmt(total);
    }
    // Tr rho S >= Tr (rho - e^c sigma)_+.
    if (std::isfinite(pt.log_positive_part) && pt.log_positive_part > e.log_success + 1e-10) sandwich_ok = false;
    for (std::size_t k = 0; k < opts.bound_alphas.size(); ++k) {
      const double al = opts.bound_alphas[k];
      const double psi = pt.psi_star[k];
      if (!std::isfinite(psi) || !std::isfinite(e.log_success)) continue;
      const double tol = 1e-9 * std::max(1.0, std::abs(psi));
      // Upper bound for NP tests: log Tr rho S <= psi*_n(al) - c (al - 1).
      if (shift == 0.0 && mode == SweepMode::np && e.log_success > psi - c * (al - 1.0) + tol) upper_ok = false;
      if (shift == 0.0 && mode == SweepMode::pinched && e.log_success > psi - c * (al - 1.0) + tol) upper_ok = false;
      // Measured two-outcome bound, valid for every test.
      if (std::isfinite(e.log_beta) && al * e.log_success + (1.0 - al) * e.log_beta > psi + tol) measured_ok = false;
    }
    if (pt.commutator > 1e-10) commute_ok = false;
    if (std::isfinite(e.log_success) && std::isfinite(e.log_beta)) {
      xs.push_back(np_threshold(e.n, 1.0, spec.scaling_exponent));
      ls.push_back(e.log_success);
      lb.push_back(e.log_beta);
    }
  }
  add_check(rep, "alpha_plus_success_is_one", total_ok, first_failure.empty() ? "within 1e-10" : first_failure);
  add_check(rep, "np_success_dominates_positive_part", sandwich_ok, "Tr rho S >= Tr(rho - e^c sigma)_+");
  add_check(rep, "finite_n_upper_bound", upper_ok, "log Tr rho S <= psi*_n(alpha) - c(alpha-1) on the alpha grid");
  add_check(rep, "measured_renyi_bound", measured_ok,
            "alpha log success + (1-alpha) log beta <= psi*_n(alpha) on the alpha grid");
  if (rep.route == "matrix" && mode == SweepMode::pinched) {
    add_check(rep, "pinched_test_commutes", commute_ok, "||[S, sigma_n]|| <= 1e-10");
  }
  if (xs.size() >= 2) {
    rep.success_fit = fit_rate(xs, ls);
    rep.beta_fit = fit_rate(xs, lb);
  } else {
    rep.success_fit = {std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, 0.0, false};
    rep.beta_fit = rep.success_fit;
  }
}

// A test sequence whose beta errors decay at rate r' cannot keep its success
// probability above exp(-n H*_{r'}); checked on the fitted rates once the
// fits look asymptotic.
void add_lower_bound_check(ExponentReport& rep, const ConvexRate& rate) {
  if (!std::isfinite(rep.success_fit.rate) || !std::isfinite(rep.beta_fit.rate)) return;
  const double r_fit = std::max(0.0, -rep.beta_fit.rate);
  const double h = hoeffding_anti(rate, r_fit).value;
  const double slack = rep.success_fit.residual + 0.02;
  const bool asymptotic = rep.success_fit.asymptotic && rep.beta_fit.asymptotic;
  const bool ok = rep.success_fit.rate >= -h - slack;
  add_check(rep, "success_rate_at_least_minus_H_at_fitted_beta_rate", ok || !asymptotic,
            "fitted success rate " + fmt(rep.success_fit.rate) + " >= -H*_r' - " + fmt(slack) + " with r' = " +
                fmt(r_fit) + ", H*_r' = " + fmt(h) + (asymptotic ? "" : " (not yet asymptotic)"));
}

}  // namespace

double np_threshold(int n, double a, int scaling_exponent) {
  return std::pow(static_cast<double>(n), scaling_exponent) * a;
}

Test np_test(const HermitianOperator& rho, const HermitianOperator& sigma, double log_threshold) {
  if (rho.dim() != sigma.dim()) throw ValidationError("dimension mismatch in NP test");
  // Rescale so that neither factor overflows; the projection is unchanged.
  Matrix diff;
  if (log_threshold > 0.0) {
    diff = std::exp(-log_threshold) * rho.matrix() - sigma.matrix();
  } else {
    diff = rho.matrix() - std::exp(log_threshold) * sigma.matrix();
  }
  return Test(positive_projection(HermitianOperator(diff)));
}

Test np_test(const StatePair& pair, double log_threshold) {
  return np_test(pair.rho(), pair.sigma(), log_threshold);
}

Test pinched_np_test(const StatePair& pair, double log_threshold, double cluster_tol) {
  return np_test(pinch(pair.rho(), pair.sigma(), cluster_tol), pair.sigma(), log_threshold);
}

Test scaled_test(const Test& t, int n, double r, double a, double phi_a, int scaling_exponent) {
  const double gap = r - a - phi_a;
  if (gap < -1e-12) throw DomainError("scaled tests need r >= a + phi(a): not in the linear-tail regime");
  if (gap <= 0.0) return t;
  return Test(t.op().scaled(std::exp(-np_threshold(n, gap, scaling_exponent))));
}

ErrorPair error_pair(const StatePair& pair, const Test& t, int n, double a) {
  ErrorPair e;
  e.n = n;
  e.a = a;
  const double success = (pair.rho().matrix() * t.op().matrix()).trace().real();
  const double beta = (pair.sigma().matrix() * t.op().matrix()).trace().real();
  e.success = clamp_unit(success);
  e.alpha_err = clamp_unit(pair.rho().trace() - success);
  e.beta_err = clamp_unit(beta);
  e.log_success = safe_log(e.success);
  e.log_beta = safe_log(e.beta_err);
  return e;
}

std::string to_string(SweepMode m) { return m == SweepMode::np ? "np" : "pinched"; }

SweepMode parse_mode(const std::string& name) {
  if (name == "np") return SweepMode::np;
  if (name == "pinched") return SweepMode::pinched;
  throw ValidationError("mode must be 'np' or 'pinched'", "mode");
}

bool ExponentReport::all_checks_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

RateFitSummary fit_rate(const std::vector<double>& n_scaled, const std::vector<double>& log_values) {
  const std::size_t total = n_scaled.size();
  if (total < 2 || log_values.size() != total) throw DomainError("rate fit needs at least two points");
  const std::size_t start = total - std::max<std::size_t>(2, (total + 1) / 2);
  const std::vector<double> x(n_scaled.begin() + static_cast<long>(start), n_scaled.end());
  const std::vector<double> y(log_values.begin() + static_cast<long>(start), log_values.end());
  RateFitSummary out;
  if (x.size() == 2) {
    out.rate = (y[1] - y[0]) / (x[1] - x[0]);
    out.intercept = y[0] - out.rate * x[0];
    out.r_squared = 1.0;
    out.residual = 0.0;
  } else {
    const LinearFit lf = least_squares(x, y);
    out.rate = lf.slope;
    out.intercept = lf.intercept;
    out.r_squared = lf.r_squared;
    out.residual = lf.rms_residual / (x.back() - x.front());
  }
  out.asymptotic = out.r_squared >= 0.98;
  return out;
}

ExponentReport exponent_sweep(const StateFamilySpec& spec, double a, const std::vector<int>& n_list,
                              SweepMode mode, const SweepOptions& opts) {
  validate_n_list(n_list);
  ExponentReport rep;
  rep.family = to_string(spec.kind);
  rep.scaling_exponent = spec.scaling_exponent;
  rep.parameter_name = "a";
  rep.parameter = a;
  rep.a_used = a;
  rep.mode = mode;
  std::string rate_source = opts.rate_provenance;
  std::optional<ConvexRate> rate = opts.rate;
  if (!rate) {
    FamilyRate fr = family_rate(spec, RenyiVariant::sandwiched);
    rate = fr.rate;
    rate_source = fr.provenance;
  }
  const PolarValue phi = polar(*rate, a);
  rep.predicted_phi = phi.value;
  rep.predicted_H = phi.value + a;
  rep.provenance = "phi: hoeffding.polar on " + rate_source;
  run_points(rep, spec, a, 0.0, n_list, mode, opts);
  add_lower_bound_check(rep, *rate);
  return rep;
}

ExponentReport sc_report(const StateFamilySpec& spec, double r, const std::vector<int>& n_list, SweepMode mode,
                         const SweepOptions& opts) {
  if (!(r >= 0.0)) throw DomainError("strong converse report needs r >= 0");
  validate_n_list(n_list);
  std::string rate_source = opts.rate_provenance;
  std::optional<ConvexRate> rate = opts.rate;
  if (!rate) {
    FamilyRate fr = family_rate(spec, RenyiVariant::sandwiched);
    rate = fr.rate;
    rate_source = fr.provenance;
  }
  const HoeffdingResult h = hoeffding_anti(*rate, r);
  ExponentReport rep;
  rep.family = to_string(spec.kind);
  rep.scaling_exponent = spec.scaling_exponent;
  rep.parameter_name = "r";
  rep.parameter = r;
  rep.mode = mode;
  rep.regime = h.regime;
  rep.predicted_H = h.value;
  double shift = 0.0;
  if (h.regime == Regime::linear_tail) {
    const double a_min = rate->right_derivative_at_1();
    const double a_max = *rate->slope_at_infinity();
    rep.a_used = a_min + opts.tail_fraction * (a_max - a_min);
    rep.predicted_phi = polar(*rate, rep.a_used).value;
    shift = std::max(0.0, r - rep.a_used - rep.predicted_phi);
    rep.test_scale_exponent = shift;
  } else {
    rep.a_used = *h.a_r;
    rep.predicted_phi = polar(*rate, rep.a_used).value;
  }
  rep.provenance = "H: hoeffding.hoeffding_anti (" + to_string(h.regime) + "), phi: hoeffding.polar on " + rate_source;
  run_points(rep, spec, rep.a_used, shift, n_list, mode, opts);

  const bool asymptotic = rep.success_fit.asymptotic && rep.beta_fit.asymptotic;
  if (std::isfinite(rep.success_fit.rate)) {
    const double slack = rep.success_fit.residual + 0.02;
    const bool reaches_r = rep.beta_fit.rate <= -r + rep.beta_fit.residual + 0.02;
    const bool converse = !reaches_r || rep.success_fit.rate <= -h.value + slack;
    add_check(rep, "success_rate_at_most_minus_H", converse || !asymptotic,
              "fitted success rate " + fmt(rep.success_fit.rate) + " vs -H*_r = " + fmt(-h.value) +
                  (asymptotic ? "" : " (not yet asymptotic)"));
  }
  add_lower_bound_check(rep, *rate);
  return rep;
}

std::vector<double> default_a_grid(const ConvexRate& f, int points) {
  const auto a_max = f.slope_at_infinity();
  if (!a_max) throw DomainError("default a-grid needs a finite slope at infinity");
  const double a_min = f.right_derivative_at_1();
  const double eps = 0.02 * (*a_max - a_min);
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    grid.push_back(a_min + eps + (*a_max - a_min - 2.0 * eps) * i / std::max(1, points - 1));
  }
  return grid;
}

}  // namespace sconv
