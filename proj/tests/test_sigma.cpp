#include <gtest/gtest.h>

#include <cmath>

#include "rdbss/sigma_probe.hpp"

using namespace rdbss;

namespace {

const std::vector<double> kGrid{0.25, 0.5, 1.0, 2.0, 4.0};

double argmax_sigma(double distance, std::size_t n, std::size_t trials, std::uint64_t seed) {
  SigmaProbeConfig c;
  c.distance = distance;
  c.subspace_dim = n;
  c.sigma_grid = kGrid;
  c.trials = trials;
  c.seed = seed;
  return empirical_best_sigma(verify_optimal_sigma(c));
}

} // namespace

TEST(SigmaProbe, OneDimensionPeaksAtDistance) {
  EXPECT_EQ(predicted_best_sigma(1.0, 1), 1.0);
  EXPECT_EQ(argmax_sigma(1.0, 1, 200000, 1), 1.0);
}

TEST(SigmaProbe, FourDimensionsPeaksAtHalfDistance) {
  EXPECT_EQ(predicted_best_sigma(2.0, 4), 1.0);
  EXPECT_EQ(argmax_sigma(2.0, 4, 200000, 2), 1.0);
}

TEST(SigmaProbe, TwoAndEightDimensions) {
  EXPECT_EQ(argmax_sigma(std::sqrt(2.0), 2, 200000, 3), 1.0);
  EXPECT_EQ(argmax_sigma(std::sqrt(8.0), 8, 200000, 4), 1.0);
}

TEST(SigmaProbe, VanishingSigmaNeverHits) {
  SigmaProbeConfig c;
  c.distance = 1.0;
  c.subspace_dim = 3;
  c.sigma_grid = {1e-9, 1.0};
  c.trials = 10000;
  const auto r = verify_optimal_sigma(c);
  EXPECT_EQ(r[0].success_rate, 0.0);
  EXPECT_GT(r[1].success_rate, 0.0);
}

TEST(SigmaProbe, RatesAreProbabilities) {
  SigmaProbeConfig c;
  c.distance = 1.5;
  c.subspace_dim = 2;
  c.sigma_grid = kGrid;
  c.trials = 5000;
  for (const auto& r : verify_optimal_sigma(c)) {
    EXPECT_GE(r.success_rate, 0.0);
    EXPECT_LE(r.success_rate, 1.0);
  }
}

TEST(SigmaProbe, RejectsBadConfig) {
  SigmaProbeConfig c;
  c.subspace_dim = 0;
  EXPECT_THROW(verify_optimal_sigma(c), ParameterError);
  EXPECT_THROW(empirical_best_sigma({}), ParameterError);
}
