#pragma once

// Fractional delays: an integer delay line followed either by a first-order
// Thiran allpass (default, IIR) or a Lagrange interpolating FIR.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rdbss/signal.hpp"

namespace rdbss {

enum class DelayKernel { thiran, lagrange };

inline constexpr std::size_t kLagrangeOrder = 3;

inline const char* to_string(DelayKernel k) {
  return k == DelayKernel::thiran ? "thiran" : "lagrange";
}

inline DelayKernel delay_kernel_from_string(const std::string& name) {
  if (name == "thiran") return DelayKernel::thiran;
  if (name == "lagrange") return DelayKernel::lagrange;
  throw ParameterError("unknown delay kernel '" + name + "'");
}

/// Input samples a delay filter may reach back for a delay of at most `max_delay`,
/// including the current sample.
inline std::size_t history_length(double max_delay) {
  return static_cast<std::size_t>(std::floor(max_delay)) + kLagrangeOrder + 2;
}

/// Coefficients for one delay value. Stateless; the allpass output memory
/// lives with the caller.
class DelayFilter {
public:
  DelayFilter() = default;

  DelayFilter(double delay, DelayKernel kernel) : delay_(delay), kernel_(kernel) {
    if (!std::isfinite(delay) || delay < 0.0) {
      throw ParameterError("delay must be finite and nonnegative");
    }
    integer_ = static_cast<std::size_t>(std::floor(delay));
    fraction_ = delay - static_cast<double>(integer_);
    if (kernel == DelayKernel::thiran) {
      eta_ = (1.0 - fraction_) / (1.0 + fraction_);
    } else {
      // Keep the interpolation point near the middle of the taps when the
      // integer delay leaves room for it.
      constexpr std::size_t half = (kLagrangeOrder - 1) / 2;
      base_ = integer_ > half ? integer_ - half : 0;
      const double local = delay - static_cast<double>(base_);
      for (std::size_t k = 0; k <= kLagrangeOrder; ++k) {
        double h = 1.0;
        for (std::size_t i = 0; i <= kLagrangeOrder; ++i) {
          if (i != k) {
            h *= (local - static_cast<double>(i)) /
                 (static_cast<double>(k) - static_cast<double>(i));
          }
        }
        taps_[k] = h;
      }
    }
  }

  double delay() const noexcept { return delay_; }
  DelayKernel kernel() const noexcept { return kernel_; }
  std::size_t integer_part() const noexcept { return integer_; }
  double fraction() const noexcept { return fraction_; }
  double allpass_coefficient() const noexcept { return eta_; }

  /// Deepest look-back (in samples) this filter reads.
  std::size_t reach() const noexcept {
    return kernel_ == DelayKernel::thiran ? integer_ + 1 : base_ + kLagrangeOrder;
  }

  /// Filters `count` samples. `ext` holds the input with `offset` samples of
  /// history in front of the first new sample; `memory` is the allpass output
  /// state (unused by Lagrange). Output is written to `out[0..count)`.
  void run(std::span<const double> ext, std::size_t offset, std::size_t count, double& memory,
           std::span<double> out) const {
    if (kernel_ == DelayKernel::thiran) {
      const std::size_t start = offset - integer_;
      if (fraction_ == 0.0) {
        for (std::size_t n = 0; n < count; ++n) out[n] = ext[start + n];
        memory = count > 0 ? out[count - 1] : memory;
        return;
      }
      double y_prev = memory;
      for (std::size_t n = 0; n < count; ++n) {
        const double u = ext[start + n];
        const double u_prev = ext[start + n - 1];
        const double y = eta_ * u + u_prev - eta_ * y_prev;
        out[n] = y;
        y_prev = y;
      }
      memory = y_prev;
    } else {
      const std::size_t start = offset - base_;
      for (std::size_t n = 0; n < count; ++n) {
        double y = 0.0;
        for (std::size_t k = 0; k <= kLagrangeOrder; ++k) y += taps_[k] * ext[start + n - k];
        out[n] = y;
      }
    }
  }

private:
  double delay_ = 0.0;
  DelayKernel kernel_ = DelayKernel::thiran;
  std::size_t integer_ = 0;
  double fraction_ = 0.0;
  double eta_ = 1.0;
  std::size_t base_ = 0;
  std::array<double, kLagrangeOrder + 1> taps_{};
};

/// Delays a single channel by `delay` samples; output has the input's length.
inline std::vector<double> fractional_delay(
    std::span<const double> x, double delay,
    double max_delay = std::numeric_limits<double>::infinity(),
    DelayKernel kernel = DelayKernel::thiran) {
  if (!std::isfinite(delay) || delay < 0.0 || delay > max_delay) {
    throw ParameterError("delay " + std::to_string(delay) + " outside [0, max_delay]");
  }
  const DelayFilter filter(delay, kernel);
  const std::size_t offset = filter.reach();
  std::vector<double> ext(offset + x.size(), 0.0);
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(offset));
  std::vector<double> out(x.size());
  double memory = 0.0;
  filter.run(ext, offset, x.size(), memory, out);
  return out;
}

} // namespace rdbss
