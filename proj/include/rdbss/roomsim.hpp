#pragma once

// Shoebox room simulation with the image-source method. Absorption is uniform
// over the six walls and derived from rt60 through Sabine's formula.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "rdbss/dsp.hpp"
#include "rdbss/fractional_delay.hpp"
#include "rdbss/signal.hpp"
#include "rdbss/unmixer.hpp"

namespace rdbss {

using Vec3 = std::array<double, 3>;

inline double distance(const Vec3& a, const Vec3& b) {
  double d2 = 0.0;
  for (int k = 0; k < 3; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(d2);
}

struct RoomSpec {
  Vec3 dimensions{5.0, 4.0, 2.5};
  double rt60 = 0.1;
  std::vector<Vec3> source_positions;
  std::vector<Vec3> mic_positions;
  int sample_rate = 16000;
  int max_image_order = 10;
  double speed_of_sound = kSpeedOfSound;
  DelayKernel kernel = DelayKernel::thiran;

  void validate() const {
    for (double d : dimensions) {
      if (!(d > 0.0)) throw ParameterError("room dimensions must be positive");
    }
    if (!(rt60 >= 0.0)) throw ParameterError("rt60 must be nonnegative");
    if (source_positions.size() < 2) throw ParameterError("room needs at least 2 sources");
    if (mic_positions.size() < 2) throw ParameterError("room needs at least 2 microphones");
    if (sample_rate <= 0) throw ParameterError("sample rate must be positive");
    if (max_image_order < 0) throw ParameterError("image order must be nonnegative");
    if (!(speed_of_sound > 0.0)) throw ParameterError("speed of sound must be positive");
    auto inside = [&](const Vec3& p) {
      for (int k = 0; k < 3; ++k) {
        if (!(p[k] > 0.0 && p[k] < dimensions[k])) return false;
      }
      return true;
    };
    for (const auto& p : source_positions) {
      if (!inside(p)) throw ParameterError("source position outside the room");
    }
    for (const auto& p : mic_positions) {
      if (!inside(p)) throw ParameterError("microphone position outside the room");
    }
  }
};

enum class MicArrayPreset { stereo, square, cube };

inline const char* to_string(MicArrayPreset p) {
  switch (p) {
  case MicArrayPreset::stereo: return "stereo";
  case MicArrayPreset::square: return "square";
  case MicArrayPreset::cube: return "cube";
  }
  return "?";
}

inline MicArrayPreset preset_from_string(const std::string& name) {
  if (name == "stereo") return MicArrayPreset::stereo;
  if (name == "square") return MicArrayPreset::square;
  if (name == "cube") return MicArrayPreset::cube;
  throw ParameterError("unknown microphone preset '" + name + "'");
}

/// Axis-aligned arrays around `center`. The stereo pair lies along x; the
/// square spans x-y; microphone 1 is always the (-x, -y, -z) corner.
inline std::vector<Vec3> mic_array(MicArrayPreset preset, const Vec3& center, double size = 0.2) {
  const double h = size / 2.0;
  std::vector<Vec3> mics;
  switch (preset) {
  case MicArrayPreset::stereo:
    mics = {{center[0] - h, center[1], center[2]}, {center[0] + h, center[1], center[2]}};
    break;
  case MicArrayPreset::square:
    for (double dy : {-h, h}) {
      for (double dx : {-h, h}) mics.push_back({center[0] + dx, center[1] + dy, center[2]});
    }
    break;
  case MicArrayPreset::cube:
    for (double dz : {-h, h}) {
      for (double dy : {-h, h}) {
        for (double dx : {-h, h}) mics.push_back({center[0] + dx, center[1] + dy, center[2] + dz});
      }
    }
    break;
  }
  return mics;
}

/// 5 x 4 x 2.5 m room, rt60 0.1 s, two sources, array centered at (3.1, 2.1, 1.2).
inline RoomSpec reference_room(MicArrayPreset preset, double rt60 = 0.1) {
  RoomSpec room;
  room.dimensions = {5.0, 4.0, 2.5};
  room.rt60 = rt60;
  room.source_positions = {{2.5, 1.5, 1.5}, {2.5, 3.3, 1.5}};
  room.mic_positions = mic_array(preset, {3.1, 2.1, 1.2});
  room.sample_rate = 16000;
  return room;
}

struct Absorption {
  double alpha = 1.0;
  bool anechoic = true;
};

/// Sabine: alpha = 0.161 V / (rt60 * A), clamped to (0, 1]. rt60 == 0 selects
/// the anechoic (direct path only) mode.
inline Absorption absorption_from_rt60(const RoomSpec& room) {
  if (!(room.rt60 >= 0.0)) throw ParameterError("rt60 must be nonnegative");
  if (room.rt60 == 0.0) return {1.0, true};
  const auto& d = room.dimensions;
  const double volume = d[0] * d[1] * d[2];
  const double area = 2.0 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]);
  const double alpha = 0.161 * volume / (room.rt60 * area);
  return {std::clamp(alpha, std::numeric_limits<double>::min(), 1.0), false};
}

struct ImageSource {
  double distance = 0.0;
  int reflections = 0;
  double amplitude = 0.0;
};

/// Image sources up to the room's reflection order (direct path only when anechoic).
inline std::vector<ImageSource> image_sources(const RoomSpec& room, std::size_t source,
                                              std::size_t mic) {
  const Vec3& src = room.source_positions.at(source);
  const Vec3& rcv = room.mic_positions.at(mic);
  const Absorption abs = absorption_from_rt60(room);
  std::vector<ImageSource> images;
  if (abs.anechoic) {
    const double r = distance(src, rcv);
    images.push_back({r, 0, 1.0 / (4.0 * std::numbers::pi * r)});
    return images;
  }

  const double beta = std::sqrt(1.0 - abs.alpha);
  const int order = room.max_image_order;
  for (int nx = -order; nx <= order; ++nx) {
    for (int ny = -order; ny <= order; ++ny) {
      for (int nz = -order; nz <= order; ++nz) {
        const std::array<int, 3> n{nx, ny, nz};
        for (int mask = 0; mask < 8; ++mask) {
          int refl = 0;
          Vec3 img{};
          for (int k = 0; k < 3; ++k) {
            const int p = (mask >> k) & 1;
            refl += std::abs(n[k] - p) + std::abs(n[k]);
            img[k] = (1 - 2 * p) * src[k] + 2.0 * n[k] * room.dimensions[k];
          }
          if (refl > order) continue;
          const double r = distance(img, rcv);
          images.push_back({r, refl, std::pow(beta, refl) / (4.0 * std::numbers::pi * r)});
        }
      }
    }
  }
  return images;
}

/// Drops the tail holding less than `threshold` of the total energy.
inline void truncate_tail(std::vector<double>& h, double threshold = 1e-6) {
  double total = 0.0;
  for (double v : h) total += v * v;
  if (total == 0.0) return;
  double tail = 0.0;
  std::size_t keep = h.size();
  while (keep > 0 && tail + h[keep - 1] * h[keep - 1] < threshold * total) {
    tail += h[keep - 1] * h[keep - 1];
    --keep;
  }
  h.resize(std::max<std::size_t>(keep, 1));
}

/// Impulse response from a source to a microphone. Each image contributes
/// amplitude beta^reflections / (4 pi r) at delay r / c * fs samples, realized
/// with the fractional delay kernel.
inline std::vector<double> impulse_response(const RoomSpec& room, std::size_t source,
                                            std::size_t mic) {
  room.validate();
  if (source >= room.source_positions.size() || mic >= room.mic_positions.size()) {
    throw ParameterError("source or microphone index out of range");
  }
  const auto images = image_sources(room, source, mic);
  const double to_samples = room.sample_rate / room.speed_of_sound;

  double latest = 0.0;
  for (const auto& img : images) latest = std::max(latest, img.distance * to_samples);
  // Room for the allpass ringing of the latest arrivals; the energy cut trims it.
  const std::size_t length = static_cast<std::size_t>(std::ceil(latest)) + 2048;

  std::vector<double> h(length, 0.0);
  std::vector<double> unit;
  for (const auto& img : images) {
    const double delay = img.distance * to_samples;
    // Run the kernel only from a few samples before the arrival onwards.
    const auto whole = static_cast<std::size_t>(std::floor(delay));
    const std::size_t start = whole > kLagrangeOrder ? whole - kLagrangeOrder : 0;
    const DelayFilter local(delay - static_cast<double>(start), room.kernel);
    const std::size_t span_len = length - start;
    unit.assign(local.reach() + span_len, 0.0);
    unit[local.reach()] = 1.0;
    std::vector<double> resp(span_len);
    double memory = 0.0;
    local.run(unit, local.reach(), span_len, memory, resp);
    for (std::size_t n = 0; n < span_len; ++n) h[start + n] += img.amplitude * resp[n];
  }
  truncate_tail(h);
  return h;
}

struct Simulation {
  /// M microphone channels.
  MultichannelSignal mixture;
  /// images[s] is source s alone at every microphone.
  std::vector<MultichannelSignal> images;
  /// Source images at microphone 1, one channel per source.
  MultichannelSignal references;
};

/// Convolves each dry source with its room responses and sums per microphone.
/// Shorter sources are zero-padded to the longest; outputs keep that length.
inline Simulation simulate(const RoomSpec& room, const std::vector<MultichannelSignal>& dry) {
  room.validate();
  if (dry.size() != room.source_positions.size()) {
    throw ParameterError("expected " + std::to_string(room.source_positions.size()) +
                         " dry sources, got " + std::to_string(dry.size()));
  }
  std::size_t length = 0;
  for (const auto& d : dry) {
    if (d.channels() != 1) throw ParameterError("dry sources must be mono");
    if (d.sample_rate() != room.sample_rate) {
      throw ParameterError("dry source sample rate " + std::to_string(d.sample_rate()) +
                           " does not match the room's " + std::to_string(room.sample_rate));
    }
    length = std::max(length, d.samples());
  }

  const std::size_t mics = room.mic_positions.size();
  Simulation sim;
  sim.mixture = MultichannelSignal(mics, length, room.sample_rate);
  sim.references = MultichannelSignal(dry.size(), length, room.sample_rate);
  for (std::size_t s = 0; s < dry.size(); ++s) {
    MultichannelSignal image(mics, length, room.sample_rate);
    for (std::size_t m = 0; m < mics; ++m) {
      const auto h = impulse_response(room, s, m);
      const auto wet = dsp::convolve(dry[s].channel(0), h, length);
      std::copy(wet.begin(), wet.end(), image.channel(m).begin());
      auto mix = sim.mixture.channel(m);
      for (std::size_t n = 0; n < length; ++n) mix[n] += wet[n];
    }
    auto ref = image.channel(0);
    std::copy(ref.begin(), ref.end(), sim.references.channel(s).begin());
    sim.images.push_back(std::move(image));
  }
  return sim;
}

} // namespace rdbss
