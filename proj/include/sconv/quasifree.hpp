#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "sconv/operator.hpp"
#include "sconv/renyi.hpp"

namespace sconv {

struct TrigTerm {
  int k1 = 0;
  int k2 = 0;
  double cos = 0.0;
  double sin = 0.0;
};

// A real function on the torus [0, 2pi)^nu, nu in {1, 2}. Trigonometric
// polynomials keep their coefficient table; closures are sampled.
class Symbol {
 public:
  // constant + sum_m cos_coeffs[m-1] cos(m x) + sin_coeffs[m-1] sin(m x).
  static Symbol trig1(double constant, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
  // constant + sum_terms cos * cos(k.x) + sin * sin(k.x).
  static Symbol trig2(double constant, std::vector<TrigTerm> terms);
  static Symbol closure(int nu, std::function<double(double, double)> fn);

  int nu() const { return nu_; }
  double operator()(double x, double y = 0.0) const { return fn_(x, y); }
  bool is_trig() const { return trig_; }
  double constant() const { return constant_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }

 private:
  int nu_ = 1;
  bool trig_ = false;
  double constant_ = 0.0;
  std::vector<TrigTerm> terms_;  // for nu = 1, k2 = 0
  std::function<double(double, double)> fn_;
};

struct QuasiFreePayload {
  int nu = 1;
  double c_bound = 0.1;
  Symbol q;
  Symbol r;

  // c_bound <= q, r <= 1 - c_bound on a dense grid.
  void validate() const;
};

// Fourier coefficients (1/N^nu) sum_x f(x) e^{-i m.x} on a uniform grid of
// N points per axis, computed with a real-to-complex FFT.
class FourierTable {
 public:
  FourierTable(const Symbol& f, int grid_per_axis);
  Complex coefficient(int m1, int m2 = 0) const;
  int grid() const { return grid_; }

 private:
  int nu_;
  int grid_;
  std::vector<Complex> data_;
};

int default_fourier_grid(int nu);

// (Multi-level) Toeplitz compression P_n f P_n, sites ordered lexicographically.
HermitianOperator toeplitz_block(const FourierTable& table, int nu, int n);

struct BlockSymbols {
  HermitianOperator Q;
  HermitianOperator R;
};

// Q_n and R_n; throws DataError if a spectrum leaves [c - 1e-8, 1 - c + 1e-8].
BlockSymbols quasifree_block_symbol(const QuasiFreePayload& p, int n);

// Single-particle psi for symbols Q, R with spectra in (0, 1):
// a Tr log(I-Q) + (1-a) Tr log(I-R) + Tr log(I + W^a) for the sandwiched
// variant, with W = Qh^{1/2} Rh^{(1-a)/a} Qh^{1/2}, Qh = Q(I-Q)^{-1}; the
// plain variant uses Tr log(I + Qh^{a/2} Rh^{1-a} Qh^{a/2}).
double quasifree_psi_from_symbols(const HermitianOperator& Q, const HermitianOperator& R, double alpha,
                                  RenyiVariant v = RenyiVariant::sandwiched);

double quasifree_psi_star_singleparticle(const QuasiFreePayload& p, int n, double alpha);
double quasifree_psi_singleparticle(const QuasiFreePayload& p, int n, double alpha, RenyiVariant v);

// det(I-Q) (+)_k wedge^k (Q(I-Q)^{-1}) on the 2^m-dimensional Fock space.
// Mode i is the i-th tensor factor (most significant bit).
HermitianOperator fock_density(const HermitianOperator& symbol);

struct Quadrature {
  double value = 0.0;
  double error = 0.0;  // |I_N - I_{N/2}|
};

int default_quadrature_grid(int nu);

// Periodic trapezoid averages over the torus.
Quadrature szego_limit(const QuasiFreePayload& p, double alpha, int grid_per_axis = 0);
Quadrature quasifree_relent_limit(const QuasiFreePayload& p, int grid_per_axis = 0);
Quadrature quasifree_max_rate(const QuasiFreePayload& p, int grid_per_axis = 0);

// Symbol values on a fixed grid, for repeated limit evaluations over alpha.
class SzegoGrid {
 public:
  SzegoGrid(const QuasiFreePayload& p, int grid_per_axis = 0);
  double psi_limit(double alpha) const;
  double relent_limit() const;
  double max_rate() const;

 private:
  std::vector<double> lq_, lq1_, lr_, lr1_;
};

}  // namespace sconv
