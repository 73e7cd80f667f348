#pragma once

// Delay-and-attenuate unmixing: Y_s = sum_m a(m,s) * delay(X_m, d(m,s)).
//
// Batch unmixing is the streaming path run over one chunk from a fresh state,
// so both produce bit-identical samples for any chunking.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rdbss/fractional_delay.hpp"
#include "rdbss/signal.hpp"

namespace rdbss {

inline constexpr double kSpeedOfSound = 343.0;

struct PathCoeff {
  double attenuation = 0.0;
  double delay = 0.0;

  friend bool operator==(const PathCoeff&, const PathCoeff&) = default;
};

/// M x S grid of (attenuation, delay) pairs with delays in [0, max_delay].
class UnmixingCoeffs {
public:
  UnmixingCoeffs() = default;

  UnmixingCoeffs(std::size_t mics, std::size_t sources, double max_delay)
      : mics_(mics), sources_(sources), max_delay_(max_delay), entries_(mics * sources) {
    if (sources < 2 || mics < sources) {
      throw ParameterError("unmixing needs mics >= sources >= 2");
    }
    if (!std::isfinite(max_delay) || max_delay < 0.0) {
      throw ParameterError("max_delay must be finite and nonnegative");
    }
  }

  /// a(m,s) = 1 when m == s, else 0; all delays zero.
  static UnmixingCoeffs identity(std::size_t mics, std::size_t sources, double max_delay) {
    UnmixingCoeffs c(mics, sources, max_delay);
    for (std::size_t s = 0; s < sources; ++s) c.at(s, s).attenuation = 1.0;
    return c;
  }

  /// a(m,s) = 1/M everywhere, zero delays.
  static UnmixingCoeffs passthrough(std::size_t mics, std::size_t sources, double max_delay) {
    UnmixingCoeffs c(mics, sources, max_delay);
    for (auto& e : c.entries_) e.attenuation = 1.0 / static_cast<double>(mics);
    return c;
  }

  std::size_t mics() const noexcept { return mics_; }
  std::size_t sources() const noexcept { return sources_; }
  double max_delay() const noexcept { return max_delay_; }

  PathCoeff& at(std::size_t m, std::size_t s) { return entries_.at(m * sources_ + s); }
  const PathCoeff& at(std::size_t m, std::size_t s) const { return entries_.at(m * sources_ + s); }

  const std::vector<PathCoeff>& entries() const noexcept { return entries_; }

  void validate() const {
    for (const auto& e : entries_) {
      if (!std::isfinite(e.attenuation) || !std::isfinite(e.delay)) {
        throw ParameterError("unmixing coefficients must be finite");
      }
      if (e.delay < 0.0 || e.delay > max_delay_) {
        throw ParameterError("delay " + std::to_string(e.delay) + " outside [0, max_delay]");
      }
    }
  }

  friend bool operator==(const UnmixingCoeffs&, const UnmixingCoeffs&) = default;

private:
  std::size_t mics_ = 0;
  std::size_t sources_ = 0;
  double max_delay_ = 0.0;
  std::vector<PathCoeff> entries_;
};

/// Flat [a11, d11, a12, d12, ...] layout, row-major over (m, s).
inline std::vector<double> encode(const UnmixingCoeffs& coeffs) {
  std::vector<double> v;
  v.reserve(2 * coeffs.entries().size());
  for (const auto& e : coeffs.entries()) {
    v.push_back(e.attenuation);
    v.push_back(e.delay);
  }
  return v;
}

/// Inverse of encode; delays are clamped into [0, max_delay], attenuations are kept.
inline UnmixingCoeffs decode(std::span<const double> vec, std::size_t mics, std::size_t sources,
                             double max_delay) {
  if (vec.size() != 2 * mics * sources) {
    throw ParameterError("coefficient vector has length " + std::to_string(vec.size()) +
                         ", expected " + std::to_string(2 * mics * sources));
  }
  UnmixingCoeffs c(mics, sources, max_delay);
  for (std::size_t m = 0; m < mics; ++m) {
    for (std::size_t s = 0; s < sources; ++s) {
      const std::size_t i = 2 * (m * sources + s);
      if (!std::isfinite(vec[i]) || !std::isfinite(vec[i + 1])) {
        throw ParameterError("coefficient vector must be finite");
      }
      c.at(m, s) = {vec[i], std::clamp(vec[i + 1], 0.0, max_delay)};
    }
  }
  return c;
}

/// 1.5 x the largest microphone-pair travel time, in samples.
inline double default_max_delay(std::span<const std::array<double, 3>> mic_positions,
                                int sample_rate, double speed_of_sound = kSpeedOfSound) {
  double widest = 0.0;
  for (std::size_t i = 0; i < mic_positions.size(); ++i) {
    for (std::size_t j = i + 1; j < mic_positions.size(); ++j) {
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double diff = mic_positions[i][k] - mic_positions[j][k];
        d2 += diff * diff;
      }
      widest = std::max(widest, std::sqrt(d2));
    }
  }
  return 1.5 * widest / speed_of_sound * static_cast<double>(sample_rate);
}

/// Delay-line input history per microphone plus allpass memory per path.
class StreamState {
public:
  StreamState() = default;

  StreamState(std::size_t mics, std::size_t sources, double max_delay)
      : mics_(mics), sources_(sources), history_(history_length(max_delay)),
        inputs_(mics, std::vector<double>(history_, 0.0)), memory_(mics * sources, 0.0) {}

  std::size_t mics() const noexcept { return mics_; }
  std::size_t sources() const noexcept { return sources_; }
  std::size_t history() const noexcept { return history_; }
  /// Samples consumed so far.
  std::size_t position() const noexcept { return position_; }

  friend bool operator==(const StreamState&, const StreamState&) = default;

private:
  friend MultichannelSignal streaming_unmix(const MultichannelSignal&, const UnmixingCoeffs&,
                                            StreamState&, DelayKernel);

  std::size_t mics_ = 0;
  std::size_t sources_ = 0;
  std::size_t history_ = 0;
  std::size_t position_ = 0;
  std::vector<std::vector<double>> inputs_;
  std::vector<double> memory_;
};

/// Unmixes one chunk and advances `state`. Coefficients may differ between
/// calls; a change takes effect at the first sample of the chunk.
inline MultichannelSignal streaming_unmix(const MultichannelSignal& chunk,
                                          const UnmixingCoeffs& coeffs, StreamState& state,
                                          DelayKernel kernel = DelayKernel::thiran) {
  if (chunk.channels() != coeffs.mics()) {
    throw ParameterError("chunk has " + std::to_string(chunk.channels()) +
                         " channels, coefficients expect " + std::to_string(coeffs.mics()));
  }
  if (state.mics_ != coeffs.mics() || state.sources_ != coeffs.sources()) {
    throw ParameterError("stream state shape does not match the coefficients");
  }
  coeffs.validate();

  const std::size_t count = chunk.samples();
  const std::size_t hist = state.history_;
  MultichannelSignal out(coeffs.sources(), count, chunk.sample_rate());
  std::vector<double> ext(hist + count);
  std::vector<double> path(count);

  for (std::size_t m = 0; m < coeffs.mics(); ++m) {
    std::copy(state.inputs_[m].begin(), state.inputs_[m].end(), ext.begin());
    auto in = chunk.channel(m);
    std::copy(in.begin(), in.end(), ext.begin() + static_cast<std::ptrdiff_t>(hist));

    for (std::size_t s = 0; s < coeffs.sources(); ++s) {
      const PathCoeff& pc = coeffs.at(m, s);
      const DelayFilter filter(pc.delay, kernel);
      if (filter.reach() > hist) {
        throw ParameterError("delay exceeds the stream state's history");
      }
      filter.run(ext, hist, count, state.memory_[m * coeffs.sources() + s], path);
      auto y = out.channel(s);
      for (std::size_t n = 0; n < count; ++n) y[n] += pc.attenuation * path[n];
    }
    std::copy(ext.end() - static_cast<std::ptrdiff_t>(hist), ext.end(), state.inputs_[m].begin());
  }
  state.position_ += count;
  return out;
}

/// Batch unmixing of a whole signal.
inline MultichannelSignal unmix(const MultichannelSignal& x, const UnmixingCoeffs& coeffs,
                                DelayKernel kernel = DelayKernel::thiran) {
  StreamState state(coeffs.mics(), coeffs.sources(), coeffs.max_delay());
  return streaming_unmix(x, coeffs, state, kernel);
}

} // namespace rdbss
