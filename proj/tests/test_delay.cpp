#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rdbss/fractional_delay.hpp"

using namespace rdbss;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sine(std::size_t n, double freq, double fs, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * kPi * freq * i / fs + phase);
  return x;
}

/// Sum of random-phase sinusoids below `top` (fraction of Nyquist).
std::vector<double> lowband(std::size_t n, double top, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi), fr(0.002, top);
  std::vector<double> x(n, 0.0);
  for (int k = 0; k < 12; ++k) {
    const double w = fr(rng) * kPi;
    const double p = ph(rng);
    for (std::size_t i = 0; i < n; ++i) x[i] += std::sin(w * i + p);
  }
  return x;
}

/// Phase (radians) of a sinusoid of angular frequency w, fitted over [from, end).
double fitted_phase(const std::vector<double>& y, double w, std::size_t from) {
  double c = 0.0, s = 0.0;
  for (std::size_t i = from; i < y.size(); ++i) {
    c += y[i] * std::cos(w * i);
    s += y[i] * std::sin(w * i);
  }
  // y ~ A sin(w i + phi) = A (sin(w i) cos(phi) + cos(w i) sin(phi))
  return std::atan2(c, s);
}

double measured_delay(double d, DelayKernel kernel, double freq_fraction) {
  const double w = freq_fraction * kPi;
  std::vector<double> x(20000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(w * i);
  const auto y = fractional_delay(x, d, INFINITY, kernel);
  double dphi = fitted_phase(x, w, 2000) - fitted_phase(y, w, 2000);
  while (dphi < 0.0) dphi += 2.0 * kPi;
  // Resolve the 2 pi ambiguity with the nominal delay.
  const double turns = std::round((w * d - dphi) / (2.0 * kPi));
  return (dphi + 2.0 * kPi * turns) / w;
}

} // namespace

TEST(FractionalDelay, ZeroDelayIsIdentity) {
  const auto x = lowband(500, 0.9, 1);
  EXPECT_EQ(fractional_delay(x, 0.0), x);
  EXPECT_EQ(fractional_delay(x, 0.0, 10.0, DelayKernel::lagrange), x);
}

TEST(FractionalDelay, IntegerShift) {
  const auto x = lowband(300, 0.9, 2);
  for (auto kernel : {DelayKernel::thiran, DelayKernel::lagrange}) {
    const auto y = fractional_delay(x, 3.0, 10.0, kernel);
    ASSERT_EQ(y.size(), x.size());
    for (std::size_t n = 0; n < 3; ++n) EXPECT_EQ(y[n], 0.0);
    for (std::size_t n = 3; n < x.size(); ++n) EXPECT_EQ(y[n], x[n - 3]);
  }
}

TEST(FractionalDelay, ThiranCoefficient) {
  const DelayFilter f(4.25, DelayKernel::thiran);
  EXPECT_EQ(f.integer_part(), 4u);
  EXPECT_DOUBLE_EQ(f.fraction(), 0.25);
  EXPECT_DOUBLE_EQ(f.allpass_coefficient(), 0.75 / 1.25);
}

TEST(FractionalDelay, HalfSampleCrossCorrelationPeak) {
  const double fs = 16000.0;
  const auto x = sine(16000, 100.0, fs);
  const auto y = fractional_delay(x, 2.5);
  // c[l] = sum x[u] y[u + l], skipping the start-up transient.
  std::vector<double> c(8, 0.0);
  for (std::size_t l = 0; l < c.size(); ++l) {
    for (std::size_t u = 500; u + l < x.size(); ++u) c[l] += x[u] * y[u + l];
  }
  const auto peak = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
  ASSERT_GT(peak, 0u);
  ASSERT_LT(peak, c.size() - 1);
  const double a = c[peak - 1], b = c[peak], d = c[peak + 1];
  const double lag = static_cast<double>(peak) + 0.5 * (a - d) / (a - 2.0 * b + d);
  EXPECT_NEAR(lag, 2.5, 0.05);
}

TEST(FractionalDelay, LowFrequencyGroupDelay) {
  for (auto kernel : {DelayKernel::thiran, DelayKernel::lagrange}) {
    for (double d : {0.1, 0.37, 0.5, 0.9, 2.25, 7.7, 13.4}) {
      for (double f : {0.01, 0.05, 0.09}) {
        EXPECT_NEAR(measured_delay(d, kernel, f), d, 0.05)
            << "d=" << d << " freq=" << f << " kernel=" << to_string(kernel);
      }
    }
  }
}

TEST(FractionalDelay, Additivity) {
  const auto x = lowband(12000, 0.05, 3);
  for (auto [d1, d2] : {std::pair{0.3, 0.4}, std::pair{1.7, 2.6}, std::pair{0.5, 0.5},
                        std::pair{4.9, 0.05}}) {
    const auto two = fractional_delay(fractional_delay(x, d1), d2);
    const auto one = fractional_delay(x, d1 + d2);
    double err = 0.0, ref = 0.0;
    for (std::size_t n = 2000; n < x.size(); ++n) {
      err += (two[n] - one[n]) * (two[n] - one[n]);
      ref += one[n] * one[n];
    }
    EXPECT_LT(10.0 * std::log10(err / ref), -60.0) << d1 << " + " << d2;
  }
}

TEST(FractionalDelay, OutputLengthMatchesInput) {
  const auto x = lowband(37, 0.5, 4);
  EXPECT_EQ(fractional_delay(x, 12.3).size(), 37u);
  EXPECT_EQ(fractional_delay(std::vector<double>{}, 1.5).size(), 0u);
}

TEST(FractionalDelay, OutOfRangeRejected) {
  const std::vector<double> x(10, 1.0);
  EXPECT_THROW(fractional_delay(x, -0.1), ParameterError);
  EXPECT_THROW(fractional_delay(x, 5.5, 5.0), ParameterError);
  EXPECT_THROW(fractional_delay(x, NAN), ParameterError);
  EXPECT_NO_THROW(fractional_delay(x, 5.0, 5.0));
}

TEST(FractionalDelay, KernelNames) {
  EXPECT_EQ(delay_kernel_from_string("thiran"), DelayKernel::thiran);
  EXPECT_EQ(delay_kernel_from_string("lagrange"), DelayKernel::lagrange);
  EXPECT_THROW(delay_kernel_from_string("sinc"), ParameterError);
}

TEST(FractionalDelay, AllpassPreservesEnergy) {
  // A unit impulse through the allpass keeps unit energy (up to truncation).
  std::vector<double> x(4000, 0.0);
  x[0] = 1.0;
  const auto y = fractional_delay(x, 0.5);
  double e = 0.0;
  for (double v : y) e += v * v;
  EXPECT_NEAR(e, 1.0, 1e-9);
}
