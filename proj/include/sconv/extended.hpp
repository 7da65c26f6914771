#pragma once

#include <limits>

namespace sconv {

// A real number or +infinity. Infinity is carried as a flag so it never
// enters arithmetic.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal finite(double v) { return {v, false}; }
  static ExtendedReal infinity() { return {std::numeric_limits<double>::infinity(), true}; }
  bool is_finite() const { return !infinite; }
};

using Divergence = ExtendedReal;

}  // namespace sconv
