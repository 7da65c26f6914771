#include "sconv/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sconv/errors.hpp"

namespace sconv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// alpha log x + (1-alpha) log y with the support conventions of Q_alpha.
// Returns nullopt-like NaN for a support violation at alpha > 1.
double log_mix(double x, double y, double alpha) {
  if (x <= 0.0) return kNegInf;
  if (alpha == 1.0) return std::log(x);
  if (y <= 0.0) return alpha > 1.0 ? std::numeric_limits<double>::quiet_NaN() : kNegInf;
  return alpha * std::log(x) + (1.0 - alpha) * std::log(y);
}

struct LogTransfer {
  Eigen::MatrixXd scaled;  // exp(log M - shift)
  double shift = 0.0;
  bool violation = false;
};

LogTransfer transfer(const MarkovPayload& m, double alpha) {
  const int d = m.states;
  Eigen::MatrixXd logm(d, d);
  LogTransfer out;
  double top = kNegInf;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double v = log_mix(m.P0(i, j), m.P1(i, j), alpha);
      if (std::isnan(v)) out.violation = true;
      logm(i, j) = v;
      if (v > top) top = v;
    }
  out.shift = std::isfinite(top) ? top : 0.0;
  out.scaled = (logm.array() - out.shift).exp().matrix();
  return out;
}

}  // namespace

void MarkovPayload::validate(bool require_positive_p1) const {
  const int d = states;
  if (d < 1) throw ValidationError("markov alphabet size must be positive", "payload.states");
  auto check_vec = [&](const RealVector& v, const std::string& name) {
    if (v.size() != d) throw ValidationError("initial distribution has wrong length", "payload." + name);
    if ((v.array() < 0.0).any() || std::abs(v.sum() - 1.0) > 1e-12) {
      throw ValidationError("initial distribution must be a probability vector", "payload." + name);
    }
  };
  auto check_mat = [&](const Eigen::MatrixXd& p, const std::string& name) {
    if (p.rows() != d || p.cols() != d) throw ValidationError("transition matrix has wrong shape", "payload." + name);
    for (int i = 0; i < d; ++i) {
      if ((p.row(i).array() < 0.0).any() || std::abs(p.row(i).sum() - 1.0) > 1e-12) {
        throw ValidationError("transition rows must sum to 1", "payload." + name);
      }
    }
  };
  check_vec(pi0, "pi0");
  check_vec(pi1, "pi1");
  check_mat(P0, "P0");
  check_mat(P1, "P1");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (P0(i, j) > 0.0 && P1(i, j) <= 0.0) {
        throw ValidationError("transition support of P0 must lie within that of P1", "payload.P1");
      }
      if (require_positive_p1 && P1(i, j) <= 0.0) {
        throw ValidationError("factorization needs a strictly positive P1", "payload.P1");
      }
    }
}

bool strongly_connected(const Eigen::MatrixXd& weights) {
  const auto d = weights.rows();
  for (Eigen::Index s = 0; s < d; ++s) {
    std::vector<char> seen(static_cast<std::size_t>(d), 0);
    std::vector<Eigen::Index> stack{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (Eigen::Index w = 0; w < d; ++w) {
        if (weights(v, w) > 0.0 && !seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return false;
  }
  return true;
}

ExtendedReal markov_psi_n(const MarkovPayload& m, double alpha, int n) {
  if (n < 1) throw DomainError("block size must be positive");
  const LogTransfer t = transfer(m, alpha);
  const int d = m.states;
  RealVector log_u(d);
  bool violation = t.violation;
  for (int i = 0; i < d; ++i) {
    log_u(i) = log_mix(m.pi0(i), m.pi1(i), alpha);
    if (std::isnan(log_u(i))) violation = true;
  }
  if (violation) return ExtendedReal::infinity();
  const double u_shift = log_u.maxCoeff();
  if (!std::isfinite(u_shift)) return ExtendedReal::finite(kNegInf);
  const RealVector u = (log_u.array() - u_shift).exp();

  RealVector v = RealVector::Ones(d);
  double log_scale = u_shift + (n - 1) * t.shift;
  for (int step = 1; step < n; ++step) {
    v = t.scaled * v;
    const double top = v.maxCoeff();
    if (top <= 0.0) return ExtendedReal::finite(kNegInf);
    v /= top;
    log_scale += std::log(top);
  }
  return ExtendedReal::finite(log_scale + std::log(u.dot(v)));
}

double markov_psi_limit(const MarkovPayload& m, double alpha) {
  const LogTransfer t = transfer(m, alpha);
  if (t.violation) throw DataError("transfer matrix undefined: support violation at alpha > 1");
  if (!strongly_connected(t.scaled)) throw DataError("transfer matrix is reducible");
  const int d = m.states;
  const Eigen::MatrixXd shifted = Eigen::MatrixXd::Identity(d, d) + t.scaled;
  RealVector x = RealVector::Ones(d);
  double lo = 0.0;
  double hi = 0.0;
  for (int it = 0; it < 1'000'000; ++it) {
    const RealVector y = shifted * x;
    const RealVector ratio = y.cwiseQuotient(x);
    lo = ratio.minCoeff();
    hi = ratio.maxCoeff();
    x = y / y.maxCoeff();
    if (hi - lo <= 1e-13 * hi) break;
  }
  const double root = 0.5 * (lo + hi) - 1.0;
  return t.shift + std::log(root);
}

double markov_relative_entropy_rate(const MarkovPayload& m) {
  const int d = m.states;
  if (!strongly_connected(m.P0)) throw DataError("P0 is reducible");
  // Stationary law: left Perron vector of P0 via power iteration on (I+P0)/2.
  const Eigen::MatrixXd lazy = 0.5 * (Eigen::MatrixXd::Identity(d, d) + m.P0);
  RealVector pi = RealVector::Constant(d, 1.0 / d);
  for (int it = 0; it < 1'000'000; ++it) {
    const RealVector next = lazy.transpose() * pi;
    const double diff = (next - pi).cwiseAbs().sum();
    pi = next / next.sum();
    if (diff < 1e-16) break;
  }
  double total = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (m.P0(i, j) > 0.0) total += pi(i) * m.P0(i, j) * std::log(m.P0(i, j) / m.P1(i, j));
  return total;
}

double markov_max_rate(const MarkovPayload& m) {
  const int d = m.states;
  if (!strongly_connected(m.P0)) throw DataError("P0 is reducible");
  // Karp: D[k][v] = best weight of a k-edge walk from vertex 0 to v.
  std::vector<std::vector<double>> best(static_cast<std::size_t>(d + 1),
                                        std::vector<double>(static_cast<std::size_t>(d), kNegInf));
  best[0][0] = 0.0;
  for (int k = 1; k <= d; ++k)
    for (int u = 0; u < d; ++u) {
      const double bu = best[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(u)];
      if (!std::isfinite(bu)) continue;
      for (int v = 0; v < d; ++v) {
        if (m.P0(u, v) <= 0.0) continue;
        const double w = std::log(m.P0(u, v) / m.P1(u, v));
        auto& slot = best[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)];
        slot = std::max(slot, bu + w);
      }
    }
  double answer = kNegInf;
  for (int v = 0; v < d; ++v) {
    const double top = best[static_cast<std::size_t>(d)][static_cast<std::size_t>(v)];
    if (!std::isfinite(top)) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < d; ++k) {
      const double bk = best[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)];
      if (!std::isfinite(bk)) continue;
      worst = std::min(worst, (top - bk) / (d - k));
    }
    answer = std::max(answer, worst);
  }
  return answer;
}

RealVector markov_path_probabilities(const RealVector& pi, const Eigen::MatrixXd& P, int n,
                                     std::size_t dim_cap) {
  const auto d = static_cast<std::size_t>(pi.size());
  const double required = std::pow(static_cast<double>(d), n);
  if (required > static_cast<double>(dim_cap)) {
    throw ResourceError("markov path space exceeds dimension cap",
                        static_cast<std::size_t>(std::min(required, 1e18)));
  }
  // Index x_0 x_1 ... x_{n-1}, first symbol most significant (Kronecker order).
  RealVector probs = pi;
  for (int k = 1; k < n; ++k) {
    RealVector next(probs.size() * static_cast<Eigen::Index>(d));
    for (Eigen::Index idx = 0; idx < probs.size(); ++idx) {
      const auto last = static_cast<Eigen::Index>(static_cast<std::size_t>(idx) % d);
      for (std::size_t j = 0; j < d; ++j)
        next(idx * static_cast<Eigen::Index>(d) + static_cast<Eigen::Index>(j)) =
            probs(idx) * P(last, static_cast<Eigen::Index>(j));
    }
    probs = std::move(next);
  }
  return probs;
}

StatePair markov_states(const MarkovPayload& m, int n, std::size_t dim_cap) {
  if (n < 1) throw DomainError("block size must be positive");
  const RealVector p = markov_path_probabilities(m.pi0, m.P0, n, dim_cap);
  const RealVector q = markov_path_probabilities(m.pi1, m.P1, n, dim_cap);
  return StatePair(HermitianOperator::diagonal(p / p.sum()), HermitianOperator::diagonal(q / q.sum()));
}

ClassicalPair markov_paths(const MarkovPayload& m, int n, std::size_t max_paths) {
  if (n < 1) throw DomainError("block size must be positive");
  const auto d = static_cast<std::size_t>(m.states);
  const double required = std::pow(static_cast<double>(d), n);
  if (required > static_cast<double>(max_paths)) {
    throw ResourceError("too many markov paths to enumerate", static_cast<std::size_t>(std::min(required, 1e18)));
  }
  std::vector<double> lp(d);
  std::vector<double> lq(d);
  std::vector<std::size_t> last(d);
  for (std::size_t i = 0; i < d; ++i) {
    lp[i] = safe_log(m.pi0(static_cast<Eigen::Index>(i)));
    lq[i] = safe_log(m.pi1(static_cast<Eigen::Index>(i)));
    last[i] = i;
  }
  for (int k = 1; k < n; ++k) {
    std::vector<double> np;
    std::vector<double> nq;
    std::vector<std::size_t> nl;
    np.reserve(lp.size() * d);
    nq.reserve(lp.size() * d);
    nl.reserve(lp.size() * d);
    for (std::size_t idx = 0; idx < lp.size(); ++idx) {
      const auto u = static_cast<Eigen::Index>(last[idx]);
      for (std::size_t j = 0; j < d; ++j) {
        const auto v = static_cast<Eigen::Index>(j);
        np.push_back(lp[idx] + safe_log(m.P0(u, v)));
        nq.push_back(lq[idx] + safe_log(m.P1(u, v)));
        nl.push_back(j);
      }
    }
    lp = std::move(np);
    lq = std::move(nq);
    last = std::move(nl);
  }
  ClassicalPair out;
  out.log_p = std::move(lp);
  out.log_q = std::move(lq);
  out.log_mult.assign(out.log_p.size(), 0.0);
  return out;
}

}  // namespace sconv
