#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rdbss/signal.hpp"

namespace rdbss::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

/// Population standard deviation (divides by n).
inline double stddev(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double mu = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

/// Linearly interpolated quantile, q in [0, 1].
inline double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw ParameterError("quantile of an empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

struct BoxStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double mean = 0.0, stddev = 0.0;
  std::size_t count = 0;
};

inline BoxStats box(std::span<const double> x) {
  BoxStats b;
  b.count = x.size();
  if (x.empty()) return b;
  std::vector<double> v(x.begin(), x.end());
  b.min = quantile(v, 0.0);
  b.q1 = quantile(v, 0.25);
  b.median = quantile(v, 0.5);
  b.q3 = quantile(v, 0.75);
  b.max = quantile(v, 1.0);
  b.mean = mean(x);
  b.stddev = stddev(x);
  return b;
}

} // namespace rdbss::stats
