#pragma once

// Separation objective: f = -mean_{i != j} D_KL(Y_i || Y_j) + lambda * |1 - P_in / P_out|,
// evaluated on a short leaky accumulation of the microphone signal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdbss/fractional_delay.hpp"
#include "rdbss/signal.hpp"
#include "rdbss/unmixer.hpp"

namespace rdbss {

/// Which probability distributions the KL term compares.
enum class Divergence {
  /// Normalized magnitude envelopes |y[n]| / sum|y| over time.
  magnitude_envelope,
  /// Amplitude histograms over a shared symmetric range.
  amplitude_histogram,
};

inline const char* to_string(Divergence d) {
  return d == Divergence::magnitude_envelope ? "envelope" : "histogram";
}

inline Divergence divergence_from_string(const std::string& name) {
  if (name == "envelope") return Divergence::magnitude_envelope;
  if (name == "histogram") return Divergence::amplitude_histogram;
  throw ParameterError("unknown divergence '" + name + "'");
}

struct ObjectiveConfig {
  double lambda = 0.1;
  std::size_t histogram_bins = 100;
  /// Symmetric amplitude bound; unset means max |y| over the compared pair.
  std::optional<double> histogram_range;
  double epsilon = 1e-6;
  std::size_t block_size = 8000;
  double leak = 0.98;
  std::size_t max_blocks = 16;
  Divergence divergence = Divergence::magnitude_envelope;
  /// Samples per envelope frame for the magnitude-envelope divergence.
  std::size_t envelope_frame = 128;

  void validate() const {
    if (!(lambda >= 0.0)) throw ParameterError("lambda must be nonnegative");
    if (histogram_bins < 2) throw ParameterError("histogram needs at least 2 bins");
    if (!(leak > 0.0 && leak < 1.0)) throw ParameterError("leak must lie in (0, 1)");
    if (block_size == 0 || max_blocks == 0) throw ParameterError("empty accumulation window");
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
    if (histogram_range && !(*histogram_range > 0.0)) {
      throw ParameterError("histogram range must be positive");
    }
  }
};

/// Leaky superposition acc <- leak * acc + (1 - leak) * block, per channel.
class BlockAccumulator {
public:
  BlockAccumulator(std::size_t channels, std::size_t block_size, int sample_rate, double leak)
      : acc_(channels, block_size, sample_rate), leak_(leak) {}

  /// Folds in x[begin, begin + block_size) on every channel.
  void push(const MultichannelSignal& x, std::size_t begin) {
    const std::size_t bs = acc_.samples();
    if (x.channels() != acc_.channels() || begin + bs > x.samples()) {
      throw ParameterError("block does not fit the accumulator");
    }
    for (std::size_t c = 0; c < acc_.channels(); ++c) {
      auto a = acc_.channel(c);
      auto b = x.channel(c).subspan(begin, bs);
      for (std::size_t n = 0; n < bs; ++n) a[n] = leak_ * a[n] + (1.0 - leak_) * b[n];
    }
    ++blocks_;
  }

  std::size_t blocks() const noexcept { return blocks_; }
  const MultichannelSignal& block() const noexcept { return acc_; }

private:
  MultichannelSignal acc_;
  double leak_;
  std::size_t blocks_ = 0;
};

/// Accumulates the first min(available blocks, max_blocks) blocks of `x`.
inline MultichannelSignal accumulate_blocks(const MultichannelSignal& x,
                                            const ObjectiveConfig& cfg) {
  cfg.validate();
  const std::size_t available = x.samples() / cfg.block_size;
  if (available == 0) {
    throw ParameterError("signal of " + std::to_string(x.samples()) +
                         " samples is shorter than one block of " +
                         std::to_string(cfg.block_size));
  }
  BlockAccumulator acc(x.channels(), cfg.block_size, x.sample_rate(), cfg.leak);
  for (std::size_t b = 0; b < std::min(available, cfg.max_blocks); ++b) {
    acc.push(x, b * cfg.block_size);
  }
  return acc.block();
}

namespace detail {

inline void floor_and_normalize(std::vector<double>& p, double epsilon) {
  double total = 0.0;
  for (double& v : p) {
    v = std::max(v, epsilon);
    total += v;
  }
  for (double& v : p) v /= total;
}

inline double kl_sum(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += p[i] * std::log(p[i] / q[i]);
  // Rounding can leave a tiny negative residue for identical inputs.
  return std::max(d, 0.0);
}

} // namespace detail

/// Normalized, epsilon-floored amplitude histogram over [-range, range].
inline std::vector<double> amplitude_histogram(std::span<const double> y, double range,
                                               std::size_t bins, double epsilon) {
  std::vector<double> h(bins, 0.0);
  if (!y.empty()) {
    const double width = 2.0 * range / static_cast<double>(bins);
    for (double v : y) {
      auto idx = static_cast<long long>(std::floor((v + range) / width));
      idx = std::clamp<long long>(idx, 0, static_cast<long long>(bins) - 1);
      h[static_cast<std::size_t>(idx)] += 1.0;
    }
    for (double& v : h) v /= static_cast<double>(y.size());
  }
  detail::floor_and_normalize(h, epsilon);
  return h;
}

/// D_KL(p || q) between the amplitude histograms of y1 and y2.
inline double kl_divergence(std::span<const double> y1, std::span<const double> y2,
                            const ObjectiveConfig& cfg) {
  if (y1.size() != y2.size()) throw ParameterError("channels must have equal length");
  double range = 0.0;
  if (cfg.histogram_range) {
    range = *cfg.histogram_range;
  } else {
    for (double v : y1) range = std::max(range, std::abs(v));
    for (double v : y2) range = std::max(range, std::abs(v));
  }
  if (range == 0.0) return 0.0;
  const auto p = amplitude_histogram(y1, range, cfg.histogram_bins, cfg.epsilon);
  const auto q = amplitude_histogram(y2, range, cfg.histogram_bins, cfg.epsilon);
  return detail::kl_sum(p, q);
}

/// Sum of |y| over consecutive frames of `frame` samples (the last frame may be
/// short), normalized to unit sum, floored at epsilon and renormalized. A
/// silent channel maps to the uniform distribution.
inline std::vector<double> magnitude_envelope(std::span<const double> y, double epsilon,
                                              std::size_t frame = 1) {
  if (frame == 0) throw ParameterError("envelope frame must be positive");
  std::vector<double> p((y.size() + frame - 1) / frame, 0.0);
  double total = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    p[n / frame] += std::abs(y[n]);
    total += std::abs(y[n]);
  }
  if (total > 0.0) {
    for (double& v : p) v /= total;
  } else {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(std::max<std::size_t>(p.size(), 1)));
  }
  detail::floor_and_normalize(p, epsilon);
  return p;
}

/// D_KL between the normalized magnitude envelopes of y1 and y2.
inline double envelope_kl_divergence(std::span<const double> y1, std::span<const double> y2,
                                     double epsilon, std::size_t frame = 1) {
  if (y1.size() != y2.size()) throw ParameterError("channels must have equal length");
  return detail::kl_sum(magnitude_envelope(y1, epsilon, frame),
                        magnitude_envelope(y2, epsilon, frame));
}

inline double divergence(std::span<const double> y1, std::span<const double> y2,
                         const ObjectiveConfig& cfg) {
  return cfg.divergence == Divergence::amplitude_histogram
             ? kl_divergence(y1, y2, cfg)
             : envelope_kl_divergence(y1, y2, cfg.epsilon, cfg.envelope_frame);
}

/// |1 - P_in / P_out| with P the channel-summed mean square; +inf for silent output.
inline double power_penalty(const MultichannelSignal& x_in, const MultichannelSignal& y_out) {
  const double p_out = y_out.power();
  if (!(p_out > 0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(1.0 - x_in.power() / p_out);
}

/// Everything the objective needs besides the coefficient vector. Immutable
/// after construction, so one context may serve concurrent evaluations.
struct SeparationContext {
  MultichannelSignal block;
  std::size_t sources = 2;
  double max_delay = 0.0;
  ObjectiveConfig config;
  DelayKernel kernel = DelayKernel::thiran;

  std::size_t mics() const noexcept { return block.channels(); }
  std::size_t dimension() const noexcept { return 2 * mics() * sources; }
};

/// Objective value of `vec` on the context's accumulated block.
inline double separation_objective(std::span<const double> vec, const SeparationContext& ctx) {
  const auto coeffs = decode(vec, ctx.mics(), ctx.sources, ctx.max_delay);
  const auto y = unmix(ctx.block, coeffs, ctx.kernel);

  const double penalty = power_penalty(ctx.block, y);
  if (!std::isfinite(penalty)) return penalty;
  if (ctx.config.divergence == Divergence::magnitude_envelope) {
    // A silent output has no envelope to compare.
    for (std::size_t s = 0; s < y.channels(); ++s) {
      const auto ch = y.channel(s);
      if (std::all_of(ch.begin(), ch.end(), [](double v) { return v == 0.0; })) {
        return std::numeric_limits<double>::infinity();
      }
    }
  }

  double kl = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < y.channels(); ++i) {
    for (std::size_t j = 0; j < y.channels(); ++j) {
      if (i == j) continue;
      kl += divergence(y.channel(i), y.channel(j), ctx.config);
      ++pairs;
    }
  }
  return -kl / static_cast<double>(pairs) + ctx.config.lambda * penalty;
}

/// Callable adaptor for the optimizer.
class SeparationObjective {
public:
  explicit SeparationObjective(SeparationContext ctx) : ctx_(std::move(ctx)) {
    ctx_.config.validate();
  }

  double operator()(std::span<const double> vec) const { return separation_objective(vec, ctx_); }

  const SeparationContext& context() const noexcept { return ctx_; }

private:
  SeparationContext ctx_;
};

} // namespace rdbss
