#include "sconv/random.hpp"

#include <cstdlib>
#include <string>

namespace sconv {

namespace {

Matrix ginibre(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(dim, dim);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

std::uint64_t seed_from_env() {
  const char* raw = std::getenv("SCONV_SEED");
  if (!raw || !*raw) return 42;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (used != std::string(raw).size()) return 42;
    return v;
  } catch (const std::exception&) {
    return 42;
  }
}

Matrix random_unitary(std::size_t dim, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(ginibre(dim, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

HermitianOperator random_density(std::size_t dim, Rng& rng, double min_weight) {
  const Matrix g = ginibre(dim, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  m = (1.0 - min_weight) * m + (min_weight / static_cast<double>(dim)) * Matrix::Identity(dim, dim);
  return HermitianOperator(m);
}

HermitianOperator random_diagonal_density(std::size_t dim, Rng& rng, double min_weight) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealVector d(dim);
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = u(rng);
  d /= d.sum();
  d = (1.0 - min_weight) * d + RealVector::Constant(dim, min_weight / static_cast<double>(dim));
  return HermitianOperator::diagonal(d);
}

HermitianOperator random_projector(std::size_t dim, Rng& rng) {
  const Matrix u = random_unitary(dim, rng);
  const Matrix v = u.col(0);
  return HermitianOperator(v * v.adjoint());
}

}  // namespace sconv
