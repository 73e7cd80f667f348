#pragma once

// Minimal RIFF/WAVE reader and writer: 16-bit PCM and 32-bit IEEE float,
// any channel count. Little-endian hosts only.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdbss/signal.hpp"

namespace rdbss {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

enum class WavEncoding { pcm16, float32 };

class WavError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
T read_le(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <class T>
void write_le(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

} // namespace detail

inline MultichannelSignal read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw WavError("'" + path + "' is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const auto size = detail::read_le<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Tolerate a truncated trailing data chunk.
      if (std::memcmp(chunk, "data", 4) == 0) {
        data = bytes.data() + body;
        data_size = static_cast<std::uint32_t>(bytes.size() - body);
      }
      break;
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw WavError("malformed fmt chunk in '" + path + "'");
      format = detail::read_le<std::uint16_t>(chunk + 8);
      channels = detail::read_le<std::uint16_t>(chunk + 10);
      rate = detail::read_le<std::uint32_t>(chunk + 12);
      bits = detail::read_le<std::uint16_t>(chunk + 22);
      if (format == 0xFFFE && size >= 40) {
        format = detail::read_le<std::uint16_t>(chunk + 32);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }

  if (channels == 0 || rate == 0) throw WavError("missing fmt chunk in '" + path + "'");
  if (data == nullptr) throw WavError("missing data chunk in '" + path + "'");

  const bool pcm16 = format == 1 && bits == 16;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32) {
    throw WavError("'" + path + "': only 16-bit PCM and 32-bit float are supported");
  }
  const std::size_t frame = channels * (bits / 8u);
  const std::size_t frames = data_size / frame;

  MultichannelSignal sig(channels, frames, static_cast<int>(rate));
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* p = data + n * frame + c * (bits / 8u);
      sig.at(c, n) = pcm16 ? detail::read_le<std::int16_t>(p) / 32768.0
                           : static_cast<double>(detail::read_le<float>(p));
    }
  }
  return sig;
}

/// PCM16 output is clipped to [-1, 1).
inline void write_wav(const std::string& path, const MultichannelSignal& sig,
                      WavEncoding encoding = WavEncoding::float32) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw WavError("cannot write '" + path + "'");

  const std::uint16_t channels = static_cast<std::uint16_t>(sig.channels());
  const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16 : 32;
  const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
  const auto data_size = static_cast<std::uint32_t>(sig.samples() * block);

  os.write("RIFF", 4);
  detail::write_le<std::uint32_t>(os, 36 + data_size);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  detail::write_le<std::uint32_t>(os, 16);
  detail::write_le<std::uint16_t>(os, encoding == WavEncoding::pcm16 ? 1 : 3);
  detail::write_le<std::uint16_t>(os, channels);
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(sig.sample_rate()));
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(sig.sample_rate()) * block);
  detail::write_le<std::uint16_t>(os, block);
  detail::write_le<std::uint16_t>(os, bits);
  os.write("data", 4);
  detail::write_le<std::uint32_t>(os, data_size);

  for (std::size_t n = 0; n < sig.samples(); ++n) {
    for (std::size_t c = 0; c < sig.channels(); ++c) {
      const double v = sig.at(c, n);
      if (encoding == WavEncoding::pcm16) {
        const double scaled = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        detail::write_le<std::int16_t>(os, static_cast<std::int16_t>(scaled));
      } else {
        detail::write_le<float>(os, static_cast<float>(v));
      }
    }
  }
  if (!os) throw WavError("write failed for '" + path + "'");
}

} // namespace rdbss
