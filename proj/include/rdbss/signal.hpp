#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdbss {

/// Raised when an operation receives arguments outside its contract.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Sample-rate tagged channels x samples matrix, stored channel-major.
class MultichannelSignal {
public:
  MultichannelSignal() = default;

  MultichannelSignal(std::size_t channels, std::size_t samples, int sample_rate)
      : channels_(channels), samples_(samples), sample_rate_(sample_rate),
        data_(channels * samples, 0.0) {
    if (sample_rate <= 0) {
      throw ParameterError("sample rate must be positive");
    }
  }

  static MultichannelSignal from_channels(const std::vector<std::vector<double>>& channels,
                                          int sample_rate) {
    if (channels.empty()) {
      throw ParameterError("signal needs at least one channel");
    }
    const std::size_t n = channels.front().size();
    for (const auto& c : channels) {
      if (c.size() != n) {
        throw ParameterError("all channels must have equal length");
      }
    }
    MultichannelSignal s(channels.size(), n, sample_rate);
    for (std::size_t c = 0; c < channels.size(); ++c) {
      std::copy(channels[c].begin(), channels[c].end(), s.channel(c).begin());
    }
    return s;
  }

  std::size_t channels() const noexcept { return channels_; }
  std::size_t samples() const noexcept { return samples_; }
  int sample_rate() const noexcept { return sample_rate_; }
  double duration_seconds() const noexcept {
    return sample_rate_ > 0 ? static_cast<double>(samples_) / sample_rate_ : 0.0;
  }

  std::span<double> channel(std::size_t c) {
    check_channel(c);
    return {data_.data() + c * samples_, samples_};
  }
  std::span<const double> channel(std::size_t c) const {
    check_channel(c);
    return {data_.data() + c * samples_, samples_};
  }

  double& at(std::size_t c, std::size_t n) { return data_[c * samples_ + n]; }
  double at(std::size_t c, std::size_t n) const { return data_[c * samples_ + n]; }

  /// Copy of samples [begin, begin + count) on every channel.
  MultichannelSignal slice(std::size_t begin, std::size_t count) const {
    if (begin + count > samples_) {
      throw ParameterError("slice out of range");
    }
    MultichannelSignal out(channels_, count, sample_rate_);
    for (std::size_t c = 0; c < channels_; ++c) {
      auto src = channel(c).subspan(begin, count);
      std::copy(src.begin(), src.end(), out.channel(c).begin());
    }
    return out;
  }

  /// Mean squared amplitude, summed over channels.
  double power() const noexcept {
    if (samples_ == 0) return 0.0;
    double total = 0.0;
    for (std::size_t c = 0; c < channels_; ++c) {
      double acc = 0.0;
      for (std::size_t n = 0; n < samples_; ++n) {
        const double v = data_[c * samples_ + n];
        acc += v * v;
      }
      total += acc / static_cast<double>(samples_);
    }
    return total;
  }

  std::vector<double>& raw() noexcept { return data_; }
  const std::vector<double>& raw() const noexcept { return data_; }

  friend bool operator==(const MultichannelSignal&, const MultichannelSignal&) = default;

private:
  void check_channel(std::size_t c) const {
    if (c >= channels_) {
      throw ParameterError("channel index " + std::to_string(c) + " out of range");
    }
  }

  std::size_t channels_ = 0;
  std::size_t samples_ = 0;
  int sample_rate_ = 0;
  std::vector<double> data_;
};

} // namespace rdbss
