#pragma once

// Monte-Carlo check of how the probe standard deviation drives the chance of
// landing in a small target ball at distance |v*|: the hit rate peaks at
// sigma = |v*| / sqrt(N) for an N-dimensional search subspace.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rdbss/rng.hpp"
#include "rdbss/signal.hpp"

namespace rdbss {

struct SigmaHitRate {
  double sigma = 0.0;
  double success_rate = 0.0;
};

struct SigmaProbeConfig {
  double distance = 1.0;
  std::size_t subspace_dim = 1;
  std::vector<double> sigma_grid;
  std::size_t trials = 1'000'000;
  /// Radius of the target ball, as a fraction of `distance`.
  double radius_fraction = 0.35;
  std::uint64_t seed = 0;
};

/// Hit rate of N(0, sigma^2 I_N) samples inside the ball of radius
/// radius_fraction * distance centered at distance * e_1, for each sigma.
/// The same standard-normal draws are rescaled for every sigma.
inline std::vector<SigmaHitRate> verify_optimal_sigma(const SigmaProbeConfig& cfg) {
  if (cfg.subspace_dim == 0) throw ParameterError("subspace dimension must be positive");
  if (!(cfg.distance > 0.0)) throw ParameterError("distance must be positive");
  if (cfg.trials == 0) throw ParameterError("trials must be positive");

  const double radius = cfg.radius_fraction * cfg.distance;
  const double radius_sq = radius * radius;
  std::vector<std::size_t> hits(cfg.sigma_grid.size(), 0);
  std::vector<double> z(cfg.subspace_dim);

  auto rng = make_engine(cfg.seed, cfg.subspace_dim);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    for (auto& zi : z) zi = gauss(rng);
    for (std::size_t g = 0; g < cfg.sigma_grid.size(); ++g) {
      const double sigma = cfg.sigma_grid[g];
      double dist_sq = (sigma * z[0] - cfg.distance) * (sigma * z[0] - cfg.distance);
      for (std::size_t i = 1; i < z.size() && dist_sq <= radius_sq; ++i) {
        dist_sq += sigma * sigma * z[i] * z[i];
      }
      if (dist_sq <= radius_sq) ++hits[g];
    }
  }

  std::vector<SigmaHitRate> out;
  out.reserve(cfg.sigma_grid.size());
  for (std::size_t g = 0; g < cfg.sigma_grid.size(); ++g) {
    out.push_back({cfg.sigma_grid[g],
                   static_cast<double>(hits[g]) / static_cast<double>(cfg.trials)});
  }
  return out;
}

/// Grid point with the highest hit rate; earlier points win ties.
inline double empirical_best_sigma(const std::vector<SigmaHitRate>& rates) {
  if (rates.empty()) throw ParameterError("empty sigma grid");
  const SigmaHitRate* best = &rates.front();
  for (const auto& r : rates) {
    if (r.success_rate > best->success_rate) best = &r;
  }
  return best->sigma;
}

inline double predicted_best_sigma(double distance, std::size_t subspace_dim) {
  return distance / std::sqrt(static_cast<double>(subspace_dim));
}

} // namespace rdbss
