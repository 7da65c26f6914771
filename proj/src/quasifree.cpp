#include "sconv/quasifree.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "sconv/errors.hpp"

namespace sconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

struct SymbolSpectrum {
  RealVector values;
  Matrix vectors;
};

SymbolSpectrum open_unit_spectrum(const HermitianOperator& op, const char* name) {
  const RealVector& v = op.eigenvalues();
  if (v(0) <= 0.0 || v(v.size() - 1) >= 1.0) {
    throw DomainError(std::string("spectrum of ") + name + " must lie in (0, 1)");
  }
  return {v, op.eigenvectors()};
}

}  // namespace

Symbol Symbol::trig1(double constant, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
  Symbol s;
  s.nu_ = 1;
  s.trig_ = true;
  s.constant_ = constant;
  const std::size_t m = std::max(cos_coeffs.size(), sin_coeffs.size());
  cos_coeffs.resize(m, 0.0);
  sin_coeffs.resize(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) s.terms_.push_back({static_cast<int>(i + 1), 0, cos_coeffs[i], sin_coeffs[i]});
  const auto terms = s.terms_;
  s.fn_ = [constant, terms](double x, double) {
    double v = constant;
    for (const auto& t : terms) v += t.cos * std::cos(t.k1 * x) + t.sin * std::sin(t.k1 * x);
    return v;
  };
  return s;
}

Symbol Symbol::trig2(double constant, std::vector<TrigTerm> terms) {
  Symbol s;
  s.nu_ = 2;
  s.trig_ = true;
  s.constant_ = constant;
  s.terms_ = terms;
  s.fn_ = [constant, terms](double x, double y) {
    double v = constant;
    for (const auto& t : terms) {
      const double phase = t.k1 * x + t.k2 * y;
      v += t.cos * std::cos(phase) + t.sin * std::sin(phase);
    }
    return v;
  };
  return s;
}

Symbol Symbol::closure(int nu, std::function<double(double, double)> fn) {
  if (nu != 1 && nu != 2) throw ValidationError("lattice dimension must be 1 or 2", "payload.nu");
  Symbol s;
  s.nu_ = nu;
  s.fn_ = std::move(fn);
  return s;
}

void QuasiFreePayload::validate() const {
  if (nu != 1 && nu != 2) throw ValidationError("lattice dimension must be 1 or 2", "payload.nu");
  if (!(c_bound > 0.0 && c_bound < 0.5)) throw ValidationError("c_bound must lie in (0, 1/2)", "payload.c_bound");
  if (q.nu() != nu || r.nu() != nu) throw ValidationError("symbol dimension differs from nu", "payload.nu");
  const int grid = nu == 1 ? 4096 : 256;
  for (const auto* s : {&q, &r}) {
    const std::string field = s == &q ? "payload.q_symbol" : "payload.r_symbol";
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < (nu == 1 ? 1 : grid); ++j) {
        const double v = (*s)(kTwoPi * i / grid, kTwoPi * j / grid);
        if (!std::isfinite(v) || v < c_bound || v > 1.0 - c_bound) {
          throw ValidationError("symbol leaves [c_bound, 1 - c_bound]", field);
        }
      }
  }
}

int default_fourier_grid(int nu) { return nu == 1 ? 1 << 14 : 1 << 10; }
int default_quadrature_grid(int nu) { return nu == 1 ? 1 << 12 : 1 << 8; }

FourierTable::FourierTable(const Symbol& f, int grid_per_axis) : nu_(f.nu()), grid_(grid_per_axis) {
  const int n = grid_;
  const int half = n / 2 + 1;
  const std::size_t in_size = nu_ == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  const std::size_t out_size = nu_ == 1 ? static_cast<std::size_t>(half) : static_cast<std::size_t>(n) * half;
  double* in = fftw_alloc_real(in_size);
  fftw_complex* out = fftw_alloc_complex(out_size);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = nu_ == 1 ? fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE)
                    : fftw_plan_dft_r2c_2d(n, n, in, out, FFTW_ESTIMATE);
  }
  if (nu_ == 1) {
    for (int j = 0; j < n; ++j) in[j] = f(kTwoPi * j / n);
  } else {
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2)
        in[static_cast<std::size_t>(j1) * n + j2] = f(kTwoPi * j1 / n, kTwoPi * j2 / n);
  }
  fftw_execute(plan);
  const double norm = static_cast<double>(in_size);
  data_.resize(out_size);
  for (std::size_t i = 0; i < out_size; ++i) data_[i] = Complex(out[i][0], out[i][1]) / norm;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
}

Complex FourierTable::coefficient(int m1, int m2) const {
  const int n = grid_;
  const int half = n / 2 + 1;
  if (nu_ == 1) {
    if (std::abs(m1) >= half) throw DomainError("Fourier index beyond grid resolution");
    return m1 >= 0 ? data_[static_cast<std::size_t>(m1)] : std::conj(data_[static_cast<std::size_t>(-m1)]);
  }
  if (std::abs(m1) >= half || std::abs(m2) >= half) throw DomainError("Fourier index beyond grid resolution");
  if (m2 < 0) return std::conj(coefficient(-m1, -m2));
  const int row = ((m1 % n) + n) % n;
  return data_[static_cast<std::size_t>(row) * half + m2];
}

HermitianOperator toeplitz_block(const FourierTable& table, int nu, int n) {
  if (n < 1) throw DomainError("block size must be positive");
  const int dim = nu == 1 ? n : n * n;
  if (dim > 4096) throw ResourceError("Toeplitz block exceeds 4096 sites", static_cast<std::size_t>(dim));
  Matrix m(dim, dim);
  if (nu == 1) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) m(j, k) = table.coefficient(j - k);
  } else {
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int j1 = 0; j1 < n; ++j1)
          for (int j2 = 0; j2 < n; ++j2) m(i1 * n + i2, j1 * n + j2) = table.coefficient(i1 - j1, i2 - j2);
  }
  return HermitianOperator(0.5 * (m + m.adjoint()));
}

BlockSymbols quasifree_block_symbol(const QuasiFreePayload& p, int n) {
  const int grid = default_fourier_grid(p.nu);
  HermitianOperator q = toeplitz_block(FourierTable(p.q, grid), p.nu, n);
  HermitianOperator r = toeplitz_block(FourierTable(p.r, grid), p.nu, n);
  for (const auto* op : {&q, &r}) {
    if (op->min_eigenvalue() < p.c_bound - 1e-8 || op->max_eigenvalue() > 1.0 - p.c_bound + 1e-8) {
      throw DataError("block symbol spectrum leaves [c_bound, 1 - c_bound]");
    }
  }
  return {q, r};
}

double quasifree_psi_from_symbols(const HermitianOperator& Q, const HermitianOperator& R, double alpha,
                                  RenyiVariant v) {
  if (!(alpha > 0.0)) throw DomainError("quasi-free psi needs alpha > 0");
  if (Q.dim() != R.dim()) throw ValidationError("symbol dimension mismatch");
  const SymbolSpectrum q = open_unit_spectrum(Q, "Q");
  const SymbolSpectrum r = open_unit_spectrum(R, "R");
  const RealVector lq1 = (1.0 - q.values.array()).log();
  const RealVector lr1 = (1.0 - r.values.array()).log();
  const RealVector lqh = q.values.array().log() - lq1.array();
  const RealVector lrh = r.values.array().log() - lr1.array();
  double total = alpha * lq1.sum() + (1.0 - alpha) * lr1.sum();

  const Matrix overlap = q.vectors.adjoint() * r.vectors;
  const double left_pow = v == RenyiVariant::sandwiched ? 0.5 : 0.5 * alpha;
  const double right_pow = v == RenyiVariant::sandwiched ? 0.5 * (1.0 - alpha) / alpha : 0.5 * (1.0 - alpha);
  const RealVector left = (left_pow * lqh).array().exp();
  const RealVector right = (right_pow * lrh).array().exp();
  const Matrix g = left.cast<Complex>().asDiagonal() * overlap * right.cast<Complex>().asDiagonal();
  Eigen::BDCSVD<Matrix> svd(g);
  const RealVector& sv = svd.singularValues();
  const double power = v == RenyiVariant::sandwiched ? alpha : 1.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= 0.0) continue;
    total += softplus(power * 2.0 * std::log(sv(i)));
  }
  return total;
}

double quasifree_psi_star_singleparticle(const QuasiFreePayload& p, int n, double alpha) {
  return quasifree_psi_singleparticle(p, n, alpha, RenyiVariant::sandwiched);
}

double quasifree_psi_singleparticle(const QuasiFreePayload& p, int n, double alpha, RenyiVariant v) {
  const BlockSymbols b = quasifree_block_symbol(p, n);
  return quasifree_psi_from_symbols(b.Q, b.R, alpha, v);
}

HermitianOperator fock_density(const HermitianOperator& symbol) {
  const auto m = static_cast<int>(symbol.dim());
  if (m > 12) throw ResourceError("Fock space oracle supports at most 12 modes", std::size_t{1} << m);
  const SymbolSpectrum s = open_unit_spectrum(symbol, "the symbol");
  const double det = (1.0 - s.values.array()).prod();
  const RealVector ratio = s.values.array() / (1.0 - s.values.array());
  const Matrix qh = s.vectors * ratio.cast<Complex>().asDiagonal() * s.vectors.adjoint();

  const int dim = 1 << m;
  // Occupied modes of a basis index; mode i sits at bit m-1-i.
  auto modes = [m](int mask) {
    std::vector<int> out;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << (m - 1 - i))) out.push_back(i);
    return out;
  };
  std::vector<std::vector<int>> by_count(static_cast<std::size_t>(m + 1));
  for (int mask = 0; mask < dim; ++mask) by_count[static_cast<std::size_t>(__builtin_popcount(mask))].push_back(mask);

  Matrix rho = Matrix::Zero(dim, dim);
  for (const auto& group : by_count) {
    for (int a : group) {
      const auto sa = modes(a);
      const auto k = static_cast<Eigen::Index>(sa.size());
      for (int b : group) {
        if (k == 0) {
          rho(a, b) = det;
          continue;
        }
        const auto sb = modes(b);
        Matrix minor(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
          for (Eigen::Index j = 0; j < k; ++j) minor(i, j) = qh(sa[static_cast<std::size_t>(i)], sb[static_cast<std::size_t>(j)]);
        rho(a, b) = det * minor.determinant();
      }
    }
  }
  return HermitianOperator(0.5 * (rho + rho.adjoint()), 1e-10);
}

SzegoGrid::SzegoGrid(const QuasiFreePayload& p, int grid_per_axis) {
  const int n = grid_per_axis > 0 ? grid_per_axis : default_quadrature_grid(p.nu);
  const int rows = p.nu == 1 ? 1 : n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rows; ++j) {
      const double x = kTwoPi * i / n;
      const double y = kTwoPi * j / n;
      const double q = p.q(x, y);
      const double r = p.r(x, y);
      lq_.push_back(std::log(q));
      lq1_.push_back(std::log1p(-q));
      lr_.push_back(std::log(r));
      lr1_.push_back(std::log1p(-r));
    }
}

double SzegoGrid::psi_limit(double alpha) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < lq_.size(); ++i) {
    const double a = alpha * lq_[i] + (1.0 - alpha) * lr_[i];
    const double b = alpha * lq1_[i] + (1.0 - alpha) * lr1_[i];
    const double top = std::max(a, b);
    sum += top + std::log1p(std::exp(std::min(a, b) - top));
  }
  return sum / static_cast<double>(lq_.size());
}

double SzegoGrid::relent_limit() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < lq_.size(); ++i) {
    const double q = std::exp(lq_[i]);
    sum += q * (lq_[i] - lr_[i]) + (1.0 - q) * (lq1_[i] - lr1_[i]);
  }
  return sum / static_cast<double>(lq_.size());
}

double SzegoGrid::max_rate() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < lq_.size(); ++i) sum += std::max(lq_[i] - lr_[i], lq1_[i] - lr1_[i]);
  return sum / static_cast<double>(lq_.size());
}

namespace {

template <typename F>
Quadrature refine_pair(const QuasiFreePayload& p, int grid_per_axis, F eval) {
  const int n = grid_per_axis > 0 ? grid_per_axis : default_quadrature_grid(p.nu);
  const double fine = eval(SzegoGrid(p, n));
  const double coarse = eval(SzegoGrid(p, n / 2));
  return {fine, std::abs(fine - coarse)};
}

}  // namespace

Quadrature szego_limit(const QuasiFreePayload& p, double alpha, int grid_per_axis) {
  if (!(alpha > 0.0)) throw DomainError("Szegő limit needs alpha > 0");
  return refine_pair(p, grid_per_axis, [alpha](const SzegoGrid& g) { return g.psi_limit(alpha); });
}

Quadrature quasifree_relent_limit(const QuasiFreePayload& p, int grid_per_axis) {
  return refine_pair(p, grid_per_axis, [](const SzegoGrid& g) { return g.relent_limit(); });
}

Quadrature quasifree_max_rate(const QuasiFreePayload& p, int grid_per_axis) {
  return refine_pair(p, grid_per_axis, [](const SzegoGrid& g) { return g.max_rate(); });
}

}  // namespace sconv
