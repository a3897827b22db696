#pragma once

#include <cmath>

namespace lcm {

// log(1 + e^y) without overflow.
inline double log1pexp(double y) {
  return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
}

inline double logistic(double y) {
  if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
  const double e = std::exp(y);
  return e / (1.0 + e);
}

}  // namespace lcm
