#include "sconv/operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "sconv/errors.hpp"

namespace sconv {

struct HermitianOperator::Payload {
  Matrix entries;
  RealVector values;
  Matrix vectors;
  std::vector<std::size_t> labels;
};

HermitianOperator::HermitianOperator(std::shared_ptr<const Payload> payload)
    : payload_(std::move(payload)) {}

HermitianOperator::HermitianOperator(const Matrix& entries, double hermiticity_tol) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw ValidationError("operator must be a non-empty square matrix");
  }
  const double scale = entries.cwiseAbs().maxCoeff();
  const double asym = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (!std::isfinite(scale) || asym > hermiticity_tol * std::max(scale, 1e-300)) {
    throw ValidationError("operator is not Hermitian (max asymmetry " + std::to_string(asym) + ")");
  }
  Matrix herm = 0.5 * (entries + entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("eigensolver failed to converge");
  }
  auto payload = std::make_shared<Payload>();
  payload->entries = std::move(herm);
  payload->values = solver.eigenvalues();
  payload->vectors = solver.eigenvectors();
  payload_ = std::move(payload);
}

HermitianOperator HermitianOperator::diagonal(const RealVector& diag) {
  const auto n = diag.size();
  if (n == 0) throw ValidationError("diagonal operator needs at least one entry");
  Matrix entries = diag.cast<Complex>().asDiagonal();
  return HermitianOperator::from_parts(std::move(entries), diag, Matrix::Identity(n, n), {});
}

HermitianOperator HermitianOperator::identity(std::size_t dim) {
  return diagonal(RealVector::Ones(static_cast<Eigen::Index>(dim)));
}

HermitianOperator HermitianOperator::zero(std::size_t dim) {
  return diagonal(RealVector::Zero(static_cast<Eigen::Index>(dim)));
}

HermitianOperator HermitianOperator::from_spectrum(const RealVector& values, const Matrix& vectors,
                                                   std::vector<std::size_t> labels) {
  if (values.size() == 0 || vectors.rows() != vectors.cols() || vectors.cols() != values.size()) {
    throw ValidationError("spectrum and eigenvector shapes disagree");
  }
  Matrix entries = vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
  entries = 0.5 * (entries + entries.adjoint()).eval();
  return HermitianOperator::from_parts(std::move(entries), values, vectors, std::move(labels));
}

std::size_t HermitianOperator::dim() const { return static_cast<std::size_t>(payload_->values.size()); }
const Matrix& HermitianOperator::matrix() const { return payload_->entries; }
const RealVector& HermitianOperator::eigenvalues() const { return payload_->values; }
const Matrix& HermitianOperator::eigenvectors() const { return payload_->vectors; }
bool HermitianOperator::has_spectral_labels() const { return !payload_->labels.empty(); }
const std::vector<std::size_t>& HermitianOperator::spectral_labels() const { return payload_->labels; }
double HermitianOperator::trace() const { return payload_->values.sum(); }
double HermitianOperator::min_eigenvalue() const { return payload_->values(0); }
double HermitianOperator::max_eigenvalue() const {
  return payload_->values(payload_->values.size() - 1);
}
double HermitianOperator::norm() const {
  return std::max(std::abs(min_eigenvalue()), std::abs(max_eigenvalue()));
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator::from_parts(factor * payload_->entries, factor * payload_->values,
                                       payload_->vectors, payload_->labels);
}

std::shared_ptr<const HermitianOperator::Payload> HermitianOperator::sorted_payload(
    Matrix entries, const RealVector& values, const Matrix& vectors, std::vector<std::size_t> labels) {
  const auto n = values.size();
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != n) {
    throw ValidationError("spectral label count does not match dimension");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  auto payload = std::make_shared<HermitianOperator::Payload>();
  payload->entries = std::move(entries);
  payload->values.resize(n);
  payload->vectors.resize(n, n);
  if (!labels.empty()) payload->labels.resize(labels.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    payload->values(i) = values(src);
    payload->vectors.col(i) = vectors.col(src);
    if (!labels.empty()) payload->labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(src)];
  }
  return payload;
}

HermitianOperator HermitianOperator::from_parts(Matrix entries, const RealVector& values,
                                                const Matrix& vectors, std::vector<std::size_t> labels) {
  return HermitianOperator(sorted_payload(std::move(entries), values, vectors, std::move(labels)));
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch in operator sum");
  return HermitianOperator(a.matrix() + b.matrix());
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch in operator difference");
  return HermitianOperator(a.matrix() - b.matrix());
}

Spectrum spectral(const HermitianOperator& op) { return op.spectrum(); }

HermitianOperator apply_spectral_function(const HermitianOperator& op,
                                          const std::function<double(double)>& fn) {
  const RealVector& lam = op.eigenvalues();
  RealVector mapped(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) mapped(i) = fn(lam(i));
  return HermitianOperator::from_spectrum(mapped, op.eigenvectors());
}

double support_cutoff(const HermitianOperator& op, double support_tol) {
  return support_tol * std::max(op.max_eigenvalue(), 0.0);
}

bool is_psd(const HermitianOperator& op, double support_tol) {
  return op.min_eigenvalue() >= -support_tol * std::max(op.max_eigenvalue(), 0.0);
}

namespace {

void require_psd(const HermitianOperator& op, double support_tol) {
  if (!is_psd(op, support_tol)) {
    throw DomainError("operator has a negative eigenvalue beyond tolerance (" +
                      std::to_string(op.min_eigenvalue()) + ")");
  }
}

}  // namespace

HermitianOperator support_projection(const HermitianOperator& op, double support_tol) {
  return power_on_support(op, 0.0, support_tol);
}

HermitianOperator power_on_support(const HermitianOperator& op, double t, double support_tol) {
  require_psd(op, support_tol);
  const double cut = support_cutoff(op, support_tol);
  return apply_spectral_function(op, [&](double x) { return x > cut ? std::pow(x, t) : 0.0; });
}

HermitianOperator log_on_support(const HermitianOperator& op, double support_tol) {
  require_psd(op, support_tol);
  const double cut = support_cutoff(op, support_tol);
  return apply_spectral_function(op, [&](double x) { return x > cut ? std::log(x) : 0.0; });
}

double positive_part_trace(const HermitianOperator& op) {
  const RealVector& lam = op.eigenvalues();
  double total = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) total += std::max(lam(i), 0.0);
  return total;
}

HermitianOperator positive_projection(const HermitianOperator& op, double zero_tol) {
  const double cut = zero_tol * std::max(op.norm(), 1.0);
  const RealVector& lam = op.eigenvalues();
  RealVector ind(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) ind(i) = lam(i) > cut ? 1.0 : 0.0;
  return HermitianOperator::from_spectrum(ind, op.eigenvectors());
}

std::vector<std::vector<Eigen::Index>> eigenvalue_clusters(const HermitianOperator& sigma,
                                                           double cluster_tol) {
  const RealVector& lam = sigma.eigenvalues();
  const auto n = lam.size();
  std::vector<std::vector<Eigen::Index>> clusters;
  if (sigma.has_spectral_labels()) {
    std::map<std::size_t, std::size_t> slot;
    const auto& labels = sigma.spectral_labels();
    for (Eigen::Index i = 0; i < n; ++i) {
      auto [it, inserted] = slot.try_emplace(labels[static_cast<std::size_t>(i)], clusters.size());
      if (inserted) clusters.emplace_back();
      clusters[it->second].push_back(i);
    }
    return clusters;
  }
  const double gap = cluster_tol * std::max(sigma.norm(), 1e-300);
  clusters.push_back({0});
  for (Eigen::Index i = 1; i < n; ++i) {
    if (lam(i) - lam(i - 1) > gap) clusters.emplace_back();
    clusters.back().push_back(i);
  }
  return clusters;
}

std::size_t distinct_eigenvalue_count(const HermitianOperator& sigma, double cluster_tol) {
  return eigenvalue_clusters(sigma, cluster_tol).size();
}

HermitianOperator pinch(const HermitianOperator& x, const HermitianOperator& sigma, double cluster_tol) {
  if (x.dim() != sigma.dim()) throw ValidationError("dimension mismatch in pinching");
  const auto clusters = eigenvalue_clusters(sigma, cluster_tol);
  const Matrix& v = sigma.eigenvectors();
  const Matrix rotated = v.adjoint() * x.matrix() * v;
  const auto n = static_cast<Eigen::Index>(x.dim());

  // Block-diagonal in sigma's eigenbasis; diagonalise block by block.
  Matrix block_diag = Matrix::Zero(n, n);
  Matrix local_vectors = Matrix::Zero(n, n);
  RealVector values(n);
  for (const auto& cluster : clusters) {
    const auto m = static_cast<Eigen::Index>(cluster.size());
    Matrix block(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) block(a, b) = rotated(cluster[a], cluster[b]);
    block = 0.5 * (block + block.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(block);
    for (Eigen::Index a = 0; a < m; ++a) {
      values(cluster[a]) = solver.eigenvalues()(a);
      for (Eigen::Index b = 0; b < m; ++b) {
        block_diag(cluster[a], cluster[b]) = block(a, b);
        local_vectors(cluster[b], cluster[a]) = solver.eigenvectors()(b, a);
      }
    }
  }
  Matrix entries = v * block_diag * v.adjoint();
  entries = 0.5 * (entries + entries.adjoint()).eval();
  return HermitianOperator::from_parts(std::move(entries), values, v * local_vectors, {});
}

bool psd_dominates(const HermitianOperator& a, const HermitianOperator& b, std::optional<double> slack) {
  const double s = slack.value_or(1e-9 * std::max({a.norm(), b.norm(), 1e-300}));
  return (a - b).min_eigenvalue() >= -s;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  Matrix entries = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  RealVector values = Eigen::kroneckerProduct(a.eigenvalues(), b.eigenvalues()).eval();
  Matrix vectors = Eigen::kroneckerProduct(a.eigenvectors(), b.eigenvectors()).eval();
  return HermitianOperator::from_parts(std::move(entries), values, vectors, {});
}

HermitianOperator tensor_power(const HermitianOperator& op, std::size_t n, std::size_t dim_cap) {
  if (n == 0) throw DomainError("tensor power needs n >= 1");
  const std::size_t d = op.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > dim_cap / d + 1) {
      throw ResourceError("tensor power exceeds dimension cap", 0);
    }
    total *= d;
  }
  if (total > dim_cap) {
    throw ResourceError("tensor power needs dimension " + std::to_string(total) + " > cap " +
                            std::to_string(dim_cap),
                        total);
  }

  // Factor cluster ids for each factor eigen-index.
  std::vector<std::size_t> base_label(d);
  std::size_t base_clusters = 0;
  {
    const auto clusters = eigenvalue_clusters(op);
    base_clusters = clusters.size();
    for (std::size_t c = 0; c < clusters.size(); ++c)
      for (auto i : clusters[c]) base_label[static_cast<std::size_t>(i)] = c;
  }

  Matrix entries = op.matrix();
  RealVector values = op.eigenvalues();
  Matrix vectors = op.eigenvectors();
  for (std::size_t k = 1; k < n; ++k) {
    entries = Eigen::kroneckerProduct(entries, op.matrix()).eval();
    values = Eigen::kroneckerProduct(values, op.eigenvalues()).eval();
    vectors = Eigen::kroneckerProduct(vectors, op.eigenvectors()).eval();
  }

  // Label each product eigenvalue by its multiset of factor clusters.
  std::map<std::vector<std::size_t>, std::size_t> ids;
  std::vector<std::size_t> labels(total);
  std::vector<std::size_t> counts(base_clusters);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::fill(counts.begin(), counts.end(), 0);
    std::size_t rem = idx;
    for (std::size_t k = 0; k < n; ++k) {
      ++counts[base_label[rem % d]];
      rem /= d;
    }
    auto [it, inserted] = ids.try_emplace(counts, ids.size());
    labels[idx] = it->second;
  }
  return HermitianOperator::from_parts(std::move(entries), values, vectors, std::move(labels));
}

double commutator_norm(const HermitianOperator& a, const HermitianOperator& b) {
  const Matrix c = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  return c.cwiseAbs().maxCoeff();
}

namespace {

Matrix support_basis(const HermitianOperator& op, double support_tol) {
  const double cut = support_cutoff(op, support_tol);
  const RealVector& lam = op.eigenvalues();
  Eigen::Index first = 0;
  while (first < lam.size() && lam(first) <= cut) ++first;
  return op.eigenvectors().rightCols(lam.size() - first);
}

}  // namespace

bool support_contained(const HermitianOperator& rho, const HermitianOperator& sigma, double support_tol,
                       double tol) {
  if (rho.dim() != sigma.dim()) throw ValidationError("dimension mismatch in support check");
  const Matrix u = support_basis(rho, support_tol);
  const Matrix v = support_basis(sigma, support_tol);
  if (u.cols() == 0) return true;
  const Matrix residual = u - v * (v.adjoint() * u);
  const Matrix gram = residual.adjoint() * residual;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  const double worst = std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
  return worst <= tol;
}

StatePair::StatePair(HermitianOperator rho, HermitianOperator sigma, double support_tol)
    : rho_(std::move(rho)), sigma_(std::move(sigma)), support_tol_(support_tol) {
  if (rho_.dim() != sigma_.dim()) throw ValidationError("state pair dimension mismatch");
  for (const auto* op : {&rho_, &sigma_}) {
    if (!is_psd(*op, support_tol_)) throw ValidationError("state is not positive semidefinite");
    if (std::abs(op->trace() - 1.0) > 1e-10) {
      throw ValidationError("state trace differs from 1 by " + std::to_string(op->trace() - 1.0));
    }
  }
  if (!support_contained(rho_, sigma_, support_tol_)) {
    throw ValidationError("support of rho is not contained in support of sigma");
  }
  const double cut = support_cutoff(sigma_, support_tol_);
  const RealVector& lam = sigma_.eigenvalues();
  double smallest = sigma_.max_eigenvalue();
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam(i) > cut) smallest = std::min(smallest, lam(i));
  support_margin_ = smallest / sigma_.max_eigenvalue();
}

Test::Test(HermitianOperator op) : op_(std::move(op)) {
  if (op_.min_eigenvalue() < -1e-10 || op_.max_eigenvalue() > 1.0 + 1e-10) {
    throw ValidationError("test eigenvalues must lie in [0, 1]");
  }
}

Test Test::identity(std::size_t dim) { return Test(HermitianOperator::identity(dim)); }
Test Test::zero(std::size_t dim) { return Test(HermitianOperator::zero(dim)); }

}  // namespace sconv
