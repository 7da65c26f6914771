#pragma once

#include <Eigen/Dense>

#include "sconv/classical.hpp"
#include "sconv/extended.hpp"
#include "sconv/operator.hpp"

namespace sconv {

// Two classical Markov chains on the same finite alphabet: initial laws
// pi0/pi1 and row-stochastic transition matrices P0/P1.
struct MarkovPayload {
  int states = 0;
  RealVector pi0;
  RealVector pi1;
  Eigen::MatrixXd P0;
  Eigen::MatrixXd P1;

  // Shapes, stochasticity to 1e-12 and transition support P0 > 0 => P1 > 0.
  // With require_positive_p1, every entry of P1 must be strictly positive.
  void validate(bool require_positive_p1 = false) const;
};

bool strongly_connected(const Eigen::MatrixXd& weights);

// log sum_paths rho_n(x)^alpha sigma_n(x)^{1-alpha} through the transfer
// matrix (M_alpha)_{ij} = P0_ij^alpha P1_ij^{1-alpha}, renormalised per step.
ExtendedReal markov_psi_n(const MarkovPayload& m, double alpha, int n);

// log of the Perron root of M_alpha by power iteration on I + M_alpha,
// stopped when the Collatz-Wielandt bounds agree to 1e-13 relative.
double markov_psi_limit(const MarkovPayload& m, double alpha);

// sum_ij pi_i P0_ij log(P0_ij/P1_ij) with pi stationary for P0.
double markov_relative_entropy_rate(const MarkovPayload& m);

// Maximum cycle mean of log(P0/P1) over transitions of P0 (Karp).
double markov_max_rate(const MarkovPayload& m);

RealVector markov_path_probabilities(const RealVector& pi, const Eigen::MatrixXd& P, int n,
                                     std::size_t dim_cap);
StatePair markov_states(const MarkovPayload& m, int n, std::size_t dim_cap = kDefaultDimCap);

// All d^n paths as atoms; throws ResourceError above max_paths.
ClassicalPair markov_paths(const MarkovPayload& m, int n, std::size_t max_paths = std::size_t{1} << 22);

}  // namespace sconv
