#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace sconv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kSupportTol = 1e-12;
inline constexpr double kClusterTol = 1e-10;
inline constexpr std::size_t kDefaultDimCap = 4096;

struct Spectrum {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors
};

// Dense Hermitian matrix with its spectral decomposition computed once at
// construction. Copies share the immutable payload.
class HermitianOperator {
 public:
  explicit HermitianOperator(const Matrix& entries, double hermiticity_tol = kHermiticityTol);

  static HermitianOperator diagonal(const RealVector& diag);
  static HermitianOperator identity(std::size_t dim);
  static HermitianOperator zero(std::size_t dim);

  // Trusted constructor: `vectors` must be unitary. Eigenvalues are sorted
  // ascending; `labels` (optional) follow the permutation and name exact
  // eigenvalue classes, e.g. index multisets of a tensor power.
  static HermitianOperator from_spectrum(const RealVector& values, const Matrix& vectors,
                                         std::vector<std::size_t> labels = {});
  // As from_spectrum, with the matching dense entries supplied by the caller.
  static HermitianOperator from_parts(Matrix entries, const RealVector& values, const Matrix& vectors,
                                      std::vector<std::size_t> labels = {});

  std::size_t dim() const;
  const Matrix& matrix() const;
  const RealVector& eigenvalues() const;
  const Matrix& eigenvectors() const;
  Spectrum spectrum() const { return {eigenvalues(), eigenvectors()}; }

  bool has_spectral_labels() const;
  const std::vector<std::size_t>& spectral_labels() const;

  double trace() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;
  // Operator norm, i.e. the largest |eigenvalue|.
  double norm() const;

  HermitianOperator scaled(double factor) const;

 private:
  struct Payload;
  explicit HermitianOperator(std::shared_ptr<const Payload> payload);
  static std::shared_ptr<const Payload> sorted_payload(Matrix entries, const RealVector& values,
                                                       const Matrix& vectors,
                                                       std::vector<std::size_t> labels);
  std::shared_ptr<const Payload> payload_;
};

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);

Spectrum spectral(const HermitianOperator& op);

// V f(diag) V^dagger, evaluated eigenvalue by eigenvalue.
HermitianOperator apply_spectral_function(const HermitianOperator& op,
                                          const std::function<double(double)>& fn);

// Eigenvalues at or below support_tol * max(largest eigenvalue, 0) count as zero.
double support_cutoff(const HermitianOperator& op, double support_tol = kSupportTol);
bool is_psd(const HermitianOperator& op, double support_tol = kSupportTol);
HermitianOperator support_projection(const HermitianOperator& op, double support_tol = kSupportTol);

HermitianOperator power_on_support(const HermitianOperator& op, double t,
                                   double support_tol = kSupportTol);
HermitianOperator log_on_support(const HermitianOperator& op, double support_tol = kSupportTol);

// Tr X_+ : the sum of the positive eigenvalues.
double positive_part_trace(const HermitianOperator& op);

// Spectral projection {op > 0}; eigenvalues within zero_tol * max(norm, 1)
// of zero are excluded.
HermitianOperator positive_projection(const HermitianOperator& op, double zero_tol = 1e-12);

// Groups of eigenvalue indices (into the ascending spectrum). Uses the exact
// spectral labels when present, otherwise single-linkage on sorted
// eigenvalues with relative gap cluster_tol.
std::vector<std::vector<Eigen::Index>> eigenvalue_clusters(const HermitianOperator& sigma,
                                                           double cluster_tol = kClusterTol);
std::size_t distinct_eigenvalue_count(const HermitianOperator& sigma,
                                      double cluster_tol = kClusterTol);

// Pinching by sigma: sum of P_i x P_i over spectral projections of sigma.
HermitianOperator pinch(const HermitianOperator& x, const HermitianOperator& sigma,
                        double cluster_tol = kClusterTol);

// True iff min eig(a - b) >= -slack. Default slack is 1e-9 times the larger norm.
bool psd_dominates(const HermitianOperator& a, const HermitianOperator& b,
                   std::optional<double> slack = std::nullopt);

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

// Exact Kronecker power. The spectrum is assembled from the factor's, and
// each eigenvalue is labelled by the multiset of factor clusters it came from.
HermitianOperator tensor_power(const HermitianOperator& op, std::size_t n,
                               std::size_t dim_cap = kDefaultDimCap);

double commutator_norm(const HermitianOperator& a, const HermitianOperator& b);

// supp rho within supp sigma, measured as || (I - P_sigma) P_rho || <= tol.
bool support_contained(const HermitianOperator& rho, const HermitianOperator& sigma,
                       double support_tol = kSupportTol, double tol = 1e-8);

// A null/alternative pair of density operators with supp rho within supp sigma.
class StatePair {
 public:
  StatePair(HermitianOperator rho, HermitianOperator sigma, double support_tol = kSupportTol);

  const HermitianOperator& rho() const { return rho_; }
  const HermitianOperator& sigma() const { return sigma_; }
  double support_tol() const { return support_tol_; }
  // Smallest retained eigenvalue of sigma relative to its largest.
  double support_margin() const { return support_margin_; }
  bool thin_support_margin() const { return support_margin_ < 1e-6; }

 private:
  HermitianOperator rho_;
  HermitianOperator sigma_;
  double support_tol_;
  double support_margin_;
};

// 0 <= T <= I, to 1e-10.
class Test {
 public:
  explicit Test(HermitianOperator op);
  static Test identity(std::size_t dim);
  static Test zero(std::size_t dim);
  const HermitianOperator& op() const { return op_; }

 private:
  HermitianOperator op_;
};

}  // namespace sconv
