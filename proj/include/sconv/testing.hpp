#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sconv/families.hpp"
#include "sconv/hoeffding.hpp"
#include "sconv/operator.hpp"

namespace sconv {

struct ErrorPair {
  int n = 0;
  double a = 0.0;
  double alpha_err = 0.0;  // Tr rho_n (I - T)
  double beta_err = 0.0;   // Tr sigma_n T
  double success = 0.0;    // Tr rho_n T
  double log_success = 0.0;
  double log_beta = 0.0;
};

// n^s a, the exponent multiplying sigma_n in the Neyman-Pearson threshold.
double np_threshold(int n, double a, int scaling_exponent = 1);

// Spectral projection onto {rho - e^c sigma > 0}; eigenvalues within 1e-12
// (relative) of zero are excluded.
Test np_test(const HermitianOperator& rho, const HermitianOperator& sigma, double log_threshold);
Test np_test(const StatePair& pair, double log_threshold);

// np_test applied to (pinch(rho, sigma), sigma).
Test pinched_np_test(const StatePair& pair, double log_threshold, double cluster_tol = kClusterTol);

// exp(-n^s (r - a - phi_a)) T. Requires r >= a + phi_a.
Test scaled_test(const Test& t, int n, double r, double a, double phi_a, int scaling_exponent = 1);

ErrorPair error_pair(const StatePair& pair, const Test& t, int n = 0, double a = 0.0);

enum class SweepMode { np, pinched };
std::string to_string(SweepMode m);
SweepMode parse_mode(const std::string& name);

struct RateFitSummary {
  double rate = 0.0;  // least-squares slope of log error against n^s
  double intercept = 0.0;
  double r_squared = 1.0;
  double residual = 0.0;
  bool asymptotic = true;  // r_squared >= 0.98
};

struct InvariantCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ExponentReport {
  std::string family;
  int scaling_exponent = 1;
  std::string parameter_name = "a";  // "a" for np-sweep, "r" for sc-report
  double parameter = 0.0;
  double a_used = 0.0;
  SweepMode mode = SweepMode::np;
  std::string route;  // classical, pinched-classical or matrix
  std::vector<ErrorPair> per_n;
  RateFitSummary success_fit;
  RateFitSummary beta_fit;
  double predicted_phi = 0.0;  // phi(a_used)
  double predicted_H = 0.0;    // H*_r for sc reports, phi(a) + a for sweeps
  std::optional<Regime> regime;
  double test_scale_exponent = 0.0;  // r - a - phi(a) when scaled tests are used
  std::string provenance;
  std::vector<InvariantCheck> checks;

  bool all_checks_passed() const;
};

struct SweepOptions {
  std::size_t dim_cap = kDefaultDimCap;
  unsigned threads = 1;
  // Rate used for predictions; computed from the family when absent.
  std::optional<ConvexRate> rate;
  std::string rate_provenance;
  // Linear-tail reports run at a = a_min + tail_fraction (a_max - a_min).
  double tail_fraction = 0.98;
  std::vector<double> bound_alphas{1.25, 1.5, 2.0, 3.0, 4.0};
};

// Fit over the last half of the points (at least two) of log error vs n^s.
RateFitSummary fit_rate(const std::vector<double>& n_scaled, const std::vector<double>& log_values);

ExponentReport exponent_sweep(const StateFamilySpec& spec, double a, const std::vector<int>& n_list,
                              SweepMode mode, const SweepOptions& opts = {});

ExponentReport sc_report(const StateFamilySpec& spec, double r, const std::vector<int>& n_list, SweepMode mode,
                         const SweepOptions& opts = {});

// 9 points spanning (a_min + eps, a_max - eps) with eps 2% of the gap.
std::vector<double> default_a_grid(const ConvexRate& f, int points = 9);

}  // namespace sconv
