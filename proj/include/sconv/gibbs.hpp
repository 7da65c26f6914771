#pragma once

#include <optional>
#include <vector>

#include "sconv/operator.hpp"

namespace sconv {

// Translation-invariant finite-range interaction: terms[j-1] acts on j
// consecutive sites (absent terms are zero). Range is terms.size().
struct GibbsPayload {
  int site_dim = 2;
  double beta = 1.0;
  std::vector<std::optional<HermitianOperator>> terms;

  int range() const { return static_cast<int>(terms.size()); }
  void validate() const;
  // sum_j ||Phi_j||.
  double interaction_norm() const;
};

// Open-boundary sum of every term embedded at every admissible position.
HermitianOperator gibbs_local_hamiltonian(const GibbsPayload& g, int n, std::size_t dim_cap = kDefaultDimCap);

// exp(-beta H_n) / Tr exp(-beta H_n).
HermitianOperator gibbs_state(const GibbsPayload& g, int n, std::size_t dim_cap = kDefaultDimCap);

struct CertificatePair {
  bool upper = false;  // eta^k w_m^{(x)k} (x) w_r >= w_{km+r}
  bool lower = false;  // w_{km+r} >= eta^{-k} w_m^{(x)k} (x) w_r
};

// r_rem = 0 means there is no remainder factor.
CertificatePair factorization_certificate(const GibbsPayload& g, int m, int k, int r_rem, double eta,
                                          std::size_t dim_cap = kDefaultDimCap);

struct Split {
  int m = 1;
  int k = 1;
  int r = 0;
};

// All splits with k, m >= 1, r >= 0 and k m + r <= max_sites.
std::vector<Split> factorization_splits(int max_sites);

struct EtaCertificate {
  double eta = 1.0;       // smallest constant certifying every split, to bisection tolerance
  double seed = 1.0;      // exp(2 beta range sum_j ||Phi_j||), the initial upper bracket
  int max_sites = 0;      // splits were checked up to this many sites only
  bool certified = false;
};

// Bisection in log eta over [1, seed] (expanded if the seed fails).
EtaCertificate smallest_eta(const GibbsPayload& g, int max_sites, std::size_t dim_cap = kDefaultDimCap,
                            double log_tol = 1e-6);

}  // namespace sconv
