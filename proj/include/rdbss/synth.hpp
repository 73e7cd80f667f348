#pragma once

// Seeded synthetic test sources: harmonic tones plus broadband noise under a
// slowly varying random envelope, so independent seeds give independent
// activity patterns.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "rdbss/rng.hpp"
#include "rdbss/signal.hpp"

namespace rdbss {

struct SynthSourceConfig {
  double fundamental_hz = 220.0;
  std::size_t harmonics = 12;
  /// Broadband noise level relative to the tonal part.
  double noise_level = 0.3;
  /// Bandwidth of the envelope modulation.
  double envelope_hz = 3.0;
  double peak = 0.5;
  /// Upper band edge; the carrier passes a 4th-order Butterworth lowpass here.
  double bandwidth_hz = 4000.0;
  std::uint64_t seed = 1;
};

/// RBJ cookbook biquad lowpass, direct form I.
class BiquadLowpass {
public:
  BiquadLowpass(double cutoff_hz, int sample_rate, double q = std::numbers::sqrt2 / 2.0) {
    const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double cw = std::cos(w0);
    const double a0 = 1.0 + alpha;
    b0_ = (1.0 - cw) / 2.0 / a0;
    b1_ = (1.0 - cw) / a0;
    b2_ = b0_;
    a1_ = -2.0 * cw / a0;
    a2_ = (1.0 - alpha) / a0;
  }

  double operator()(double x) {
    const double y = b0_ * x + b1_ * x1_ + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

private:
  double b0_, b1_, b2_, a1_, a2_;
  double x1_ = 0.0, x2_ = 0.0, y1_ = 0.0, y2_ = 0.0;
};

inline MultichannelSignal noise_modulated_tone(std::size_t samples, int sample_rate,
                                               const SynthSourceConfig& cfg) {
  auto rng = make_engine(cfg.seed, 0x5E17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  std::vector<double> phases(cfg.harmonics);
  for (auto& p : phases) p = phase(rng);

  // Two cascaded one-pole lowpasses turn white noise into a slow envelope.
  const double pole = std::exp(-2.0 * std::numbers::pi * cfg.envelope_hz / sample_rate);
  double lp1 = 0.0, lp2 = 0.0;
  const double nyquist = sample_rate / 2.0;
  const double band = std::min(cfg.bandwidth_hz, 0.9 * nyquist);
  // Butterworth 4th order = two biquads with Q = 0.5412 and 1.3066.
  BiquadLowpass stage1(band, sample_rate, 0.54119610);
  BiquadLowpass stage2(band, sample_rate, 1.30656296);

  MultichannelSignal out(1, samples, sample_rate);
  auto y = out.channel(0);
  for (std::size_t n = 0; n < samples; ++n) {
    const double t = static_cast<double>(n) / sample_rate;
    double tone = 0.0;
    for (std::size_t h = 0; h < cfg.harmonics; ++h) {
      const double f = cfg.fundamental_hz * static_cast<double>(h + 1);
      if (f >= band) break;
      tone += std::sin(2.0 * std::numbers::pi * f * t + phases[h]) / static_cast<double>(h + 1);
    }
    lp1 = pole * lp1 + (1.0 - pole) * gauss(rng);
    lp2 = pole * lp2 + (1.0 - pole) * lp1;
    const double carrier = tone + cfg.noise_level * gauss(rng);
    y[n] = std::max(lp2, 0.0) * stage2(stage1(carrier));
  }

  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : y) v *= cfg.peak / peak;
  }
  return out;
}

/// Two contrasting sources for quick experiments.
inline std::vector<MultichannelSignal> synthetic_pair(std::size_t samples, int sample_rate,
                                                      std::uint64_t seed) {
  SynthSourceConfig a;
  a.fundamental_hz = 180.0;
  a.seed = derive_seed(seed, 1);
  SynthSourceConfig b;
  b.fundamental_hz = 310.0;
  b.harmonics = 8;
  b.noise_level = 0.6;
  b.envelope_hz = 4.0;
  b.seed = derive_seed(seed, 2);
  return {noise_modulated_tone(samples, sample_rate, a), noise_modulated_tone(samples, sample_rate, b)};
}

} // namespace rdbss
