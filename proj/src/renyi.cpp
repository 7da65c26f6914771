#include "sconv/renyi.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sconv/errors.hpp"
#include "sconv/numeric.hpp"

namespace sconv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SupportPart {
  RealVector log_values;
  Matrix vectors;
};

SupportPart support_part(const HermitianOperator& op, double support_tol) {
  if (!is_psd(op, support_tol)) throw DomainError("Rényi quantities need PSD arguments");
  const double cut = support_cutoff(op, support_tol);
  const RealVector& lam = op.eigenvalues();
  Eigen::Index first = 0;
  while (first < lam.size() && lam(first) <= cut) ++first;
  const Eigen::Index r = lam.size() - first;
  SupportPart part;
  part.log_values = lam.tail(r).array().log();
  part.vectors = op.eigenvectors().rightCols(r);
  return part;
}

// Thin SVD of G = diag(sqrt a) W diag(b^{s/2}); the squared singular values
// are the eigenvalues of rho^{1/2} sigma^s rho^{1/2} on rho's support.
struct SandwichFactor {
  RealVector log_mu;  // log of retained eigenvalues
  Matrix right;       // matching right singular vectors (sigma-support coordinates)
};

SandwichFactor sandwich_factor(const RealVector& log_a, const RealVector& log_b, const Matrix& overlap,
                               double s) {
  const RealVector left = (0.5 * log_a).array().exp();
  const RealVector right = (0.5 * s * log_b).array().exp();
  const Matrix g = left.cast<Complex>().asDiagonal() * overlap * right.cast<Complex>().asDiagonal();
  Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  SandwichFactor out;
  if (sv.size() == 0 || sv(0) <= 0.0) return out;
  const double floor =
      static_cast<double>(std::max(g.rows(), g.cols())) * std::numeric_limits<double>::epsilon() * sv(0);
  Eigen::Index k = 0;
  while (k < sv.size() && sv(k) > floor) ++k;
  out.log_mu = 2.0 * sv.head(k).array().log();
  out.right = svd.matrixV().leftCols(k);
  return out;
}

}  // namespace

std::string to_string(RenyiVariant v) { return v == RenyiVariant::plain ? "plain" : "sandwiched"; }

RenyiVariant parse_variant(const std::string& name) {
  if (name == "plain") return RenyiVariant::plain;
  if (name == "sandwiched") return RenyiVariant::sandwiched;
  throw ValidationError("unknown Rényi variant '" + name + "'", "variant");
}

RenyiEvaluator::RenyiEvaluator(const HermitianOperator& rho, const HermitianOperator& sigma,
                               double support_tol) {
  if (rho.dim() != sigma.dim()) throw ValidationError("dimension mismatch in Rényi pair");
  SupportPart a = support_part(rho, support_tol);
  SupportPart b = support_part(sigma, support_tol);
  log_a_ = std::move(a.log_values);
  log_b_ = std::move(b.log_values);
  overlap_ = a.vectors.adjoint() * b.vectors;
  log_overlap_sq_ = overlap_.cwiseAbs2().array().log();
  contained_ = sconv::support_contained(rho, sigma, support_tol);
  log_trace_rho_ = log_a_.size() == 0 ? kNegInf : log_sum_exp(log_a_.data(), log_a_.size());
}

RenyiEvaluator::RenyiEvaluator(const StatePair& pair)
    : RenyiEvaluator(pair.rho(), pair.sigma(), pair.support_tol()) {}

double RenyiEvaluator::psi(double t, RenyiVariant v) const {
  if (!std::isfinite(t)) throw DomainError("Rényi parameter must be finite");
  if (log_a_.size() == 0 || log_b_.size() == 0) return kNegInf;
  if (v == RenyiVariant::plain) {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(log_a_.size() * log_b_.size()));
    for (Eigen::Index j = 0; j < log_b_.size(); ++j)
      for (Eigen::Index i = 0; i < log_a_.size(); ++i)
        terms.push_back(t * log_a_(i) + (1.0 - t) * log_b_(j) + log_overlap_sq_(i, j));
    return log_sum_exp(terms);
  }
  if (t <= 0.0) throw DomainError("sandwiched Rényi quantities need t > 0");
  const SandwichFactor f = sandwich_factor(log_a_, log_b_, overlap_, (1.0 - t) / t);
  if (f.log_mu.size() == 0) return kNegInf;
  const RealVector scaled = t * f.log_mu;
  return log_sum_exp(scaled.data(), static_cast<std::size_t>(scaled.size()));
}

double RenyiEvaluator::q(double t, RenyiVariant v) const { return std::exp(psi(t, v)); }

Divergence RenyiEvaluator::divergence(double alpha, RenyiVariant v) const {
  if (alpha < 0.0) throw DomainError("Rényi divergence needs alpha >= 0");
  if (alpha == 1.0) return relative_entropy();
  if (alpha > 1.0 && !contained_) return Divergence::infinity();
  const double p = psi(alpha, v);
  if (!std::isfinite(p)) return Divergence::infinity();
  return Divergence::finite((p - log_trace_rho_) / (alpha - 1.0));
}

RenyiValue RenyiEvaluator::value(double alpha, RenyiVariant v) const {
  RenyiValue out;
  out.alpha = alpha;
  out.variant = v;
  out.psi = psi(alpha, v);
  out.q = std::exp(out.psi);
  out.divergence = divergence(alpha, v);
  return out;
}

Divergence RenyiEvaluator::relative_entropy() const {
  if (!contained_) return Divergence::infinity();
  if (log_a_.size() == 0) throw DomainError("relative entropy of the zero operator");
  const RealVector a = log_a_.array().exp();
  const Eigen::MatrixXd w = overlap_.cwiseAbs2();
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double cross = 0.0;
    for (Eigen::Index j = 0; j < log_b_.size(); ++j) cross += w(i, j) * log_b_(j);
    total += a(i) * (log_a_(i) - cross);
  }
  return Divergence::finite(total / a.sum());
}

Divergence RenyiEvaluator::max_relative_entropy() const {
  if (!contained_) return Divergence::infinity();
  const SandwichFactor f = sandwich_factor(log_a_, log_b_, overlap_, -1.0);
  if (f.log_mu.size() == 0) throw DomainError("max-relative entropy of the zero operator");
  return Divergence::finite(f.log_mu(0));
}

double RenyiEvaluator::psi_derivative(double t, RenyiVariant v) const {
  const double p = psi(t, v);
  if (!std::isfinite(p)) throw DomainError("psi derivative undefined when rho sigma = 0");
  double total = 0.0;
  if (v == RenyiVariant::plain) {
    for (Eigen::Index j = 0; j < log_b_.size(); ++j)
      for (Eigen::Index i = 0; i < log_a_.size(); ++i) {
        const double term = t * log_a_(i) + (1.0 - t) * log_b_(j) + log_overlap_sq_(i, j);
        if (std::isfinite(term)) total += std::exp(term - p) * (log_a_(i) - log_b_(j));
      }
    return total;
  }
  // Tr M^{t-1} rho^{1/2} sigma^s (log sigma) rho^{1/2} reduces to
  // sum_i mu_i^t <v_i|log sigma|v_i> over right singular vectors v_i of G.
  const SandwichFactor f = sandwich_factor(log_a_, log_b_, overlap_, (1.0 - t) / t);
  for (Eigen::Index i = 0; i < f.log_mu.size(); ++i) {
    const double w = std::exp(t * f.log_mu(i) - p);
    const double c = f.right.col(i).cwiseAbs2().dot(log_b_);
    total += w * (f.log_mu(i) - c / t);
  }
  return total;
}

Divergence RenyiEvaluator::psi_slope_at_infinity(RenyiVariant v) const {
  if (!contained_) return Divergence::infinity();
  if (v == RenyiVariant::sandwiched) return max_relative_entropy();
  double best = kNegInf;
  const double floor = 1e-24;
  for (Eigen::Index j = 0; j < log_b_.size(); ++j)
    for (Eigen::Index i = 0; i < log_a_.size(); ++i)
      if (std::norm(overlap_(i, j)) > floor) best = std::max(best, log_a_(i) - log_b_(j));
  return Divergence::finite(best);
}

double q_value(const HermitianOperator& rho, const HermitianOperator& sigma, double t, RenyiVariant v) {
  return RenyiEvaluator(rho, sigma).q(t, v);
}

double psi_value(const HermitianOperator& rho, const HermitianOperator& sigma, double t, RenyiVariant v) {
  return RenyiEvaluator(rho, sigma).psi(t, v);
}

Divergence renyi_divergence(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha,
                            RenyiVariant v) {
  return RenyiEvaluator(rho, sigma).divergence(alpha, v);
}

Divergence relative_entropy(const HermitianOperator& rho, const HermitianOperator& sigma) {
  return RenyiEvaluator(rho, sigma).relative_entropy();
}

Divergence max_relative_entropy(const HermitianOperator& rho, const HermitianOperator& sigma) {
  return RenyiEvaluator(rho, sigma).max_relative_entropy();
}

double psi_derivative(const HermitianOperator& rho, const HermitianOperator& sigma, double t,
                      RenyiVariant v) {
  return RenyiEvaluator(rho, sigma).psi_derivative(t, v);
}

ScalingResidual scaling_check(const HermitianOperator& rho, const HermitianOperator& sigma, double lambda,
                              double kappa, double alpha, RenyiVariant v) {
  if (lambda <= 0.0 || kappa <= 0.0) throw DomainError("scaling factors must be positive");
  const RenyiEvaluator base(rho, sigma);
  const RenyiEvaluator moved(rho.scaled(lambda), sigma.scaled(kappa));
  ScalingResidual out;
  out.psi = std::abs(moved.psi(alpha, v) - alpha * std::log(lambda) - (1.0 - alpha) * std::log(kappa) -
                     base.psi(alpha, v));
  const Divergence d0 = base.divergence(alpha, v);
  const Divergence d1 = moved.divergence(alpha, v);
  if (d0.infinite || d1.infinite) {
    out.divergence = d0.infinite == d1.infinite ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    out.divergence = std::abs(d1.value - d0.value - std::log(lambda) + std::log(kappa));
  }
  return out;
}

}  // namespace sconv
