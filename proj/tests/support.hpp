#pragma once

#include <initializer_list>

#include "sconv/operator.hpp"

namespace sconv::test {

inline RealVector vec(std::initializer_list<double> xs) {
  RealVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline HermitianOperator diag(std::initializer_list<double> xs) { return HermitianOperator::diagonal(vec(xs)); }

inline HermitianOperator pauli(char which) {
  Matrix m(2, 2);
  if (which == 'x') m << 0, 1, 1, 0;
  if (which == 'y') m << 0, Complex(0, -1), Complex(0, 1), 0;
  if (which == 'z') m << 1, 0, 0, -1;
  return HermitianOperator(m);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace sconv::test
