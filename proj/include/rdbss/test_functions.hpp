#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace rdbss::testfn {

/// Squared Euclidean norm.
inline double sphere(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

/// 10 n + sum(x^2 - 10 cos(2 pi x)); global minimum 0 at the origin.
inline double rastrigin(std::span<const double> x) {
  double acc = 10.0 * static_cast<double>(x.size());
  for (double v : x) acc += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return acc;
}

} // namespace rdbss::testfn
