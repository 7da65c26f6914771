#pragma once

#include <string>

#include "sconv/extended.hpp"
#include "sconv/operator.hpp"

namespace sconv {

enum class RenyiVariant { plain, sandwiched };

std::string to_string(RenyiVariant v);
RenyiVariant parse_variant(const std::string& name);

struct RenyiValue {
  double alpha = 0.0;
  RenyiVariant variant = RenyiVariant::plain;
  double q = 0.0;
  double psi = 0.0;
  Divergence divergence;
};

// Rényi quantities of a PSD pair (trace one not required). The support
// eigenpairs of both operators and their overlap matrix are computed once,
// so repeated evaluations over an alpha grid are cheap.
class RenyiEvaluator {
 public:
  RenyiEvaluator(const HermitianOperator& rho, const HermitianOperator& sigma,
                 double support_tol = kSupportTol);
  explicit RenyiEvaluator(const StatePair& pair);

  // log Q_t. Plain accepts any real t, sandwiched needs t > 0. Returns -inf
  // when Q_t = 0.
  double psi(double t, RenyiVariant v) const;
  double q(double t, RenyiVariant v) const;

  // alpha == 1 is routed to relative_entropy().
  Divergence divergence(double alpha, RenyiVariant v) const;
  RenyiValue value(double alpha, RenyiVariant v) const;
  Divergence relative_entropy() const;
  Divergence max_relative_entropy() const;
  double psi_derivative(double t, RenyiVariant v) const;
  // lim psi(t)/t as t -> inf: max-relative entropy for the sandwiched
  // variant, the largest log a_i - log b_j over overlapping eigenvectors for
  // the plain one. Requires the support condition.
  Divergence psi_slope_at_infinity(RenyiVariant v) const;

  bool support_contained() const { return contained_; }
  double log_trace_rho() const { return log_trace_rho_; }

 private:
  RealVector log_a_;  // log of rho's support eigenvalues
  RealVector log_b_;  // log of sigma's support eigenvalues
  Matrix overlap_;    // <u_i|v_j> over the two supports
  Eigen::MatrixXd log_overlap_sq_;
  bool contained_ = true;
  double log_trace_rho_ = 0.0;
};

double q_value(const HermitianOperator& rho, const HermitianOperator& sigma, double t, RenyiVariant v);
double psi_value(const HermitianOperator& rho, const HermitianOperator& sigma, double t, RenyiVariant v);
Divergence renyi_divergence(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha,
                            RenyiVariant v);
Divergence relative_entropy(const HermitianOperator& rho, const HermitianOperator& sigma);
Divergence max_relative_entropy(const HermitianOperator& rho, const HermitianOperator& sigma);
double psi_derivative(const HermitianOperator& rho, const HermitianOperator& sigma, double t,
                      RenyiVariant v);

struct ScalingResidual {
  double psi = 0.0;
  double divergence = 0.0;
};

// Residuals of psi(a|l rho||k sigma) = psi(a|rho||sigma) + a log l + (1-a) log k
// and D(l rho||k sigma) = D(rho||sigma) + log l - log k.
ScalingResidual scaling_check(const HermitianOperator& rho, const HermitianOperator& sigma, double lambda,
                              double kappa, double alpha, RenyiVariant v);

}  // namespace sconv
