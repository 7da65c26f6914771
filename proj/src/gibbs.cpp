#include "sconv/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sconv/errors.hpp"

namespace sconv {

namespace {

std::size_t checked_dim(int d, int n, std::size_t dim_cap) {
  const double required = std::pow(static_cast<double>(d), n);
  if (required > static_cast<double>(dim_cap)) {
    throw ResourceError("Gibbs state on " + std::to_string(n) + " sites needs dimension " +
                            std::to_string(static_cast<unsigned long long>(std::min(required, 1e18))) +
                            " > cap " + std::to_string(dim_cap),
                        static_cast<std::size_t>(std::min(required, 1e18)));
  }
  return static_cast<std::size_t>(required);
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t out = 1;
  for (int i = 0; i < e; ++i) out *= b;
  return out;
}

}  // namespace

void GibbsPayload::validate() const {
  if (site_dim < 1) throw ValidationError("site dimension must be positive", "payload.site_dim");
  if (!(beta > 0.0)) throw ValidationError("inverse temperature must be positive", "payload.beta");
  if (terms.empty()) throw ValidationError("interaction needs range >= 1", "payload.terms");
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (!terms[j]) continue;
    if (terms[j]->dim() != ipow(static_cast<std::size_t>(site_dim), static_cast<int>(j + 1))) {
      throw ValidationError("term acting on " + std::to_string(j + 1) + " sites has wrong dimension",
                            "payload.terms[" + std::to_string(j) + "]");
    }
  }
}

double GibbsPayload::interaction_norm() const {
  double total = 0.0;
  for (const auto& t : terms)
    if (t) total += t->norm();
  return total;
}

HermitianOperator gibbs_local_hamiltonian(const GibbsPayload& g, int n, std::size_t dim_cap) {
  if (n < 1) throw DomainError("chain length must be positive");
  g.validate();
  const std::size_t dim = checked_dim(g.site_dim, n, dim_cap);
  const auto d = static_cast<std::size_t>(g.site_dim);
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (int j = 1; j <= g.range(); ++j) {
    const auto& term = g.terms[static_cast<std::size_t>(j - 1)];
    if (!term || j > n) continue;
    const Matrix& phi = term->matrix();
    const std::size_t block = ipow(d, j);
    for (int k = 0; k + j <= n; ++k) {
      const std::size_t left = ipow(d, k);
      const std::size_t right = ipow(d, n - k - j);
      for (std::size_t p = 0; p < left; ++p)
        for (std::size_t s = 0; s < right; ++s)
          for (std::size_t a = 0; a < block; ++a) {
            const auto row = static_cast<Eigen::Index>((p * block + a) * right + s);
            for (std::size_t b = 0; b < block; ++b) {
              const auto col = static_cast<Eigen::Index>((p * block + b) * right + s);
              h(row, col) += phi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
          }
    }
  }
  return HermitianOperator(h);
}

HermitianOperator gibbs_state(const GibbsPayload& g, int n, std::size_t dim_cap) {
  const HermitianOperator h = gibbs_local_hamiltonian(g, n, dim_cap);
  const RealVector& e = h.eigenvalues();
  RealVector w = (-g.beta * (e.array() - e(0))).exp();
  w /= w.sum();
  return HermitianOperator::from_spectrum(w, h.eigenvectors());
}

CertificatePair factorization_certificate(const GibbsPayload& g, int m, int k, int r_rem, double eta,
                                          std::size_t dim_cap) {
  if (m < 1 || k < 1 || r_rem < 0) throw DomainError("split needs m, k >= 1 and r >= 0");
  if (!(eta >= 1.0)) throw DomainError("factorization constant must be >= 1");
  checked_dim(g.site_dim, k * m + r_rem, dim_cap);
  const HermitianOperator whole = gibbs_state(g, k * m + r_rem, dim_cap);
  HermitianOperator product = tensor_power(gibbs_state(g, m, dim_cap), static_cast<std::size_t>(k), dim_cap);
  if (r_rem > 0) product = kron(product, gibbs_state(g, r_rem, dim_cap));
  const double grow = std::pow(eta, k);
  CertificatePair out;
  out.upper = psd_dominates(product.scaled(grow), whole);
  out.lower = psd_dominates(whole, product.scaled(1.0 / grow));
  return out;
}

std::vector<Split> factorization_splits(int max_sites) {
  std::vector<Split> out;
  for (int m = 1; m <= max_sites; ++m)
    for (int k = 1; k * m <= max_sites; ++k)
      for (int r = 0; k * m + r <= max_sites; ++r) out.push_back({m, k, r});
  return out;
}

EtaCertificate smallest_eta(const GibbsPayload& g, int max_sites, std::size_t dim_cap, double log_tol) {
  g.validate();
  checked_dim(g.site_dim, max_sites, dim_cap);
  EtaCertificate cert;
  cert.max_sites = max_sites;
  cert.seed = std::exp(2.0 * g.beta * g.range() * g.interaction_norm());

  // Each split reduces to one generalized comparison of two fixed operators;
  // build them once and rescale inside the bisection.
  struct Pair {
    int k;
    HermitianOperator whole;
    HermitianOperator product;
    double passed_at;  // smallest log eta known to pass
    double failed_at;  // largest log eta known to fail
  };
  std::vector<HermitianOperator> states;
  for (int n = 1; n <= max_sites; ++n) states.push_back(gibbs_state(g, n, dim_cap));
  std::vector<Pair> pairs;
  for (const Split& s : factorization_splits(max_sites)) {
    HermitianOperator product = tensor_power(states[static_cast<std::size_t>(s.m - 1)],
                                             static_cast<std::size_t>(s.k), dim_cap);
    if (s.r > 0) product = kron(product, states[static_cast<std::size_t>(s.r - 1)]);
    pairs.push_back({s.k, states[static_cast<std::size_t>(s.k * s.m + s.r - 1)], product,
                     std::numeric_limits<double>::infinity(), -1.0});
  }
  auto holds = [&](double log_eta) {
    for (auto& p : pairs) {
      if (log_eta >= p.passed_at) continue;
      if (log_eta <= p.failed_at) return false;
      const double grow = std::exp(p.k * log_eta);
      const bool ok = psd_dominates(p.product.scaled(grow), p.whole) &&
                      psd_dominates(p.whole, p.product.scaled(1.0 / grow));
      if (ok) {
        p.passed_at = log_eta;
      } else {
        p.failed_at = log_eta;
        // Check this split first next time.
        std::swap(p, pairs.front());
        return false;
      }
    }
    return true;
  };

  double lo = 0.0;
  double hi = std::log(cert.seed);
  if (holds(lo)) {
    cert.eta = 1.0;
    cert.certified = true;
    return cert;
  }
  for (int grow = 0; !holds(hi); ++grow) {
    if (grow > 60) return cert;
    lo = hi;
    hi = std::max(2.0 * hi, 1e-3);
  }
  while (hi - lo > log_tol) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  cert.eta = std::exp(hi);
  cert.certified = true;
  return cert;
}

}  // namespace sconv
