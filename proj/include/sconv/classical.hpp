#pragma once

#include <cstddef>
#include <vector>

#include "sconv/operator.hpp"

namespace sconv {

// A commuting pair as weighted atoms: atom k stands for exp(log_mult[k])
// outcomes, each of probability exp(log_p[k]) under the null hypothesis and
// exp(log_q[k]) under the alternative. Everything stays in log space so
// block sizes in the thousands do not underflow.
struct ClassicalPair {
  std::vector<double> log_p;
  std::vector<double> log_q;
  std::vector<double> log_mult;

  std::size_t size() const { return log_p.size(); }
  void add(double lp, double lq, double lm = 0.0);

  // log sum_k m_k p_k^t q_k^{1-t}, over atoms with p_k > 0 and q_k > 0.
  double psi(double t) const;
  double log_total_p() const;
  double log_total_q() const;
};

ClassicalPair classical_from_distributions(const RealVector& p, const RealVector& q);

// Diagonal of rho in sigma's eigenbasis; the caller asserts [rho, sigma] = 0.
ClassicalPair classical_from_commuting(const HermitianOperator& rho, const HermitianOperator& sigma);

// (p^n, q^n) grouped into multinomial types. Throws ResourceError when the
// number of types exceeds max_atoms.
ClassicalPair iid_types(const RealVector& p, const RealVector& q, int n, std::size_t max_atoms = 5'000'000);

// Eigen-decomposition of (pinch(rho^n by sigma^n), sigma^n) computed block by
// block in sigma^n's spectral subspaces, never forming d^n x d^n matrices.
ClassicalPair pinched_iid(const HermitianOperator& rho, const HermitianOperator& sigma, int n,
                          std::size_t dim_cap = kDefaultDimCap);

// Error probabilities of the likelihood-ratio test {p - e^c q > 0}.
struct ClassicalErrors {
  double log_success = 0.0;        // log sum_{test} p
  double log_alpha = 0.0;          // log sum_{not test} p
  double log_beta = 0.0;           // log sum_{test} q
  double log_positive_part = 0.0;  // log sum (p - e^c q)_+
};

ClassicalErrors np_errors(const ClassicalPair& pair, double log_threshold);

}  // namespace sconv
