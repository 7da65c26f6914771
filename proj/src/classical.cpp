#include "sconv/classical.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "sconv/errors.hpp"
#include "sconv/numeric.hpp"

namespace sconv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

void ClassicalPair::add(double lp, double lq, double lm) {
  log_p.push_back(lp);
  log_q.push_back(lq);
  log_mult.push_back(lm);
}

double ClassicalPair::psi(double t) const {
  std::vector<double> terms;
  terms.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) {
    if (!std::isfinite(log_p[k]) || !std::isfinite(log_q[k])) continue;
    terms.push_back(log_mult[k] + t * log_p[k] + (1.0 - t) * log_q[k]);
  }
  return log_sum_exp(terms);
}

double ClassicalPair::log_total_p() const {
  std::vector<double> terms(size());
  for (std::size_t k = 0; k < size(); ++k) terms[k] = log_mult[k] + log_p[k];
  return log_sum_exp(terms);
}

double ClassicalPair::log_total_q() const {
  std::vector<double> terms(size());
  for (std::size_t k = 0; k < size(); ++k) terms[k] = log_mult[k] + log_q[k];
  return log_sum_exp(terms);
}

ClassicalPair classical_from_distributions(const RealVector& p, const RealVector& q) {
  if (p.size() != q.size() || p.size() == 0) throw ValidationError("distributions must have equal length");
  ClassicalPair out;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) < 0.0 || q(i) < 0.0) throw ValidationError("probabilities must be nonnegative");
    out.add(safe_log(p(i)), safe_log(q(i)));
  }
  return out;
}

ClassicalPair classical_from_commuting(const HermitianOperator& rho, const HermitianOperator& sigma) {
  // A generic combination separates joint eigenvectors even when sigma is
  // degenerate.
  const HermitianOperator mix(rho.matrix() + 0.5772156649015329 * sigma.matrix());
  const Matrix& u = mix.eigenvectors();
  const RealVector p = (u.adjoint() * rho.matrix() * u).diagonal().real();
  const RealVector q = (u.adjoint() * sigma.matrix() * u).diagonal().real();
  const double cp = support_cutoff(rho);
  const double cq = support_cutoff(sigma);
  ClassicalPair out;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    out.add(p(i) > cp ? std::log(p(i)) : kNegInf, q(i) > cq ? std::log(q(i)) : kNegInf);
  }
  return out;
}

ClassicalPair iid_types(const RealVector& p, const RealVector& q, int n, std::size_t max_atoms) {
  if (n < 1) throw DomainError("block size must be positive");
  const auto d = static_cast<int>(p.size());
  if (d == 0 || q.size() != p.size()) throw ValidationError("distributions must have equal length");
  // Number of compositions of n into d parts, C(n+d-1, d-1).
  const double log_count = std::lgamma(n + d) - std::lgamma(n + 1) - std::lgamma(d);
  if (log_count > std::log(static_cast<double>(max_atoms))) {
    throw ResourceError("too many multinomial types", static_cast<std::size_t>(std::exp(log_count)));
  }
  std::vector<double> lp(static_cast<std::size_t>(d));
  std::vector<double> lq(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    lp[static_cast<std::size_t>(i)] = safe_log(p(i));
    lq[static_cast<std::size_t>(i)] = safe_log(q(i));
  }
  ClassicalPair out;
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  counts[0] = n;
  const double log_nfact = std::lgamma(n + 1.0);
  while (true) {
    double a = 0.0;
    double b = 0.0;
    double m = log_nfact;
    for (int i = 0; i < d; ++i) {
      const int k = counts[static_cast<std::size_t>(i)];
      if (k > 0) {
        a += k * lp[static_cast<std::size_t>(i)];
        b += k * lq[static_cast<std::size_t>(i)];
      }
      m -= std::lgamma(k + 1.0);
    }
    out.add(a, b, m);
    // Next composition in reverse lexicographic order.
    int j = d - 2;
    while (j >= 0 && counts[static_cast<std::size_t>(j)] == 0) --j;
    if (j < 0) break;
    --counts[static_cast<std::size_t>(j)];
    const int rest = counts[static_cast<std::size_t>(d - 1)] + 1;
    counts[static_cast<std::size_t>(d - 1)] = 0;
    counts[static_cast<std::size_t>(j + 1)] = rest;
  }
  return out;
}

ClassicalPair pinched_iid(const HermitianOperator& rho, const HermitianOperator& sigma, int n,
                          std::size_t dim_cap) {
  if (n < 1) throw DomainError("block size must be positive");
  const std::size_t d = rho.dim();
  if (sigma.dim() != d) throw ValidationError("dimension mismatch in pinched pair");
  const double required = std::pow(static_cast<double>(d), n);
  if (required > static_cast<double>(dim_cap)) {
    throw ResourceError("pinched tensor power needs dimension " + std::to_string(static_cast<unsigned long long>(std::min(required, 1e18))) + " > cap " +
                            std::to_string(dim_cap),
                        static_cast<std::size_t>(std::min(required, 1e18)));
  }
  const auto total = static_cast<std::size_t>(required);
  const auto clusters = eigenvalue_clusters(sigma);
  std::vector<std::size_t> cluster_of(d);
  std::vector<double> cluster_log(clusters.size());
  const RealVector& b = sigma.eigenvalues();
  const double cut = support_cutoff(sigma);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    double mean = 0.0;
    for (auto i : clusters[c]) {
      cluster_of[static_cast<std::size_t>(i)] = c;
      mean += b(i);
    }
    mean /= static_cast<double>(clusters[c].size());
    cluster_log[c] = mean > cut ? std::log(mean) : kNegInf;
  }
  const Matrix rb = sigma.eigenvectors().adjoint() * rho.matrix() * sigma.eigenvectors();

  // Group product strings by their multiset of sigma clusters.
  std::map<std::vector<int>, std::vector<std::size_t>> groups;
  std::vector<int> counts(clusters.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::fill(counts.begin(), counts.end(), 0);
    std::size_t rem = idx;
    for (int k = 0; k < n; ++k) {
      ++counts[cluster_of[rem % d]];
      rem /= d;
    }
    groups[counts].push_back(idx);
  }

  ClassicalPair out;
  std::vector<std::size_t> xs(static_cast<std::size_t>(n));
  for (const auto& [key, members] : groups) {
    double lq = 0.0;
    for (std::size_t c = 0; c < key.size(); ++c)
      if (key[c] > 0) lq += key[c] * cluster_log[c];
    const auto m = static_cast<Eigen::Index>(members.size());
    Matrix block(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      std::size_t ra = members[static_cast<std::size_t>(a)];
      for (int k = 0; k < n; ++k) {
        xs[static_cast<std::size_t>(k)] = ra % d;
        ra /= d;
      }
      for (Eigen::Index c = a; c < m; ++c) {
        std::size_t rc = members[static_cast<std::size_t>(c)];
        Complex entry(1.0, 0.0);
        for (int k = 0; k < n; ++k) {
          entry *= rb(static_cast<Eigen::Index>(xs[static_cast<std::size_t>(k)]),
                      static_cast<Eigen::Index>(rc % d));
          rc /= d;
        }
        block(a, c) = entry;
        block(c, a) = std::conj(entry);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(block, Eigen::EigenvaluesOnly);
    const RealVector& lam = solver.eigenvalues();
    for (Eigen::Index k = 0; k < m; ++k) out.add(safe_log(lam(k)), lq);
  }
  return out;
}

ClassicalErrors np_errors(const ClassicalPair& pair, double log_threshold) {
  std::vector<double> in_p;
  std::vector<double> out_p;
  std::vector<double> in_q;
  std::vector<double> pos;
  const double slack = 1e-12 * std::max(1.0, std::abs(log_threshold));
  for (std::size_t k = 0; k < pair.size(); ++k) {
    const double lp = pair.log_p[k];
    const double lq = pair.log_q[k];
    const double lm = pair.log_mult[k];
    if (!std::isfinite(lp)) continue;
    const double llr = std::isfinite(lq) ? lp - lq : std::numeric_limits<double>::infinity();
    if (llr > log_threshold + slack) {
      in_p.push_back(lm + lp);
      if (std::isfinite(lq)) {
        in_q.push_back(lm + lq);
        pos.push_back(lm + lp + std::log1p(-std::exp(log_threshold - llr)));
      } else {
        pos.push_back(lm + lp);
      }
    } else {
      out_p.push_back(lm + lp);
    }
  }
  ClassicalErrors e;
  e.log_success = log_sum_exp(in_p);
  e.log_alpha = log_sum_exp(out_p);
  e.log_beta = log_sum_exp(in_q);
  e.log_positive_part = log_sum_exp(pos);
  return e;
}

}  // namespace sconv
