// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "newsreel/error.hpp"

namespace newsreel::media {

static_assert(std::endian::native == std::endian::little,
              "binary readers assume a little-endian host");

struct Audio {
  std::vector<double> samples;
  double sample_rate = 0.0;
};

namespace detail {

inline std::vector<char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::MissingFile, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace detail

/// Mono RIFF/WAVE with 16-bit PCM or 32-bit IEEE float samples.
inline Audio read_wav(const std::filesystem::path& path) {
  const auto bytes = detail::read_all(path);
  const auto fail = [&](const std::string& what) {
    return Error(ErrorKind::Malformed, path.string() + ": " + what);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* chunk = bytes.data() + pos;
    const auto size = detail::load_le<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw fail("chunk extends past end of file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw fail("fmt chunk too small");
      format = detail::load_le<std::uint16_t>(bytes.data() + body);
      channels = detail::load_le<std::uint16_t>(bytes.data() + body + 2);
      rate = detail::load_le<std::uint32_t>(bytes.data() + body + 4);
      bits = detail::load_le<std::uint16_t>(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      if (channels != 1) throw fail("only mono audio is supported");
      Audio audio;
      audio.sample_rate = rate;
      const char* p = bytes.data() + body;
      if (format == 1 && bits == 16) {
        audio.samples.resize(size / 2);
        for (std::size_t i = 0; i < audio.samples.size(); ++i) {
          audio.samples[i] = detail::load_le<std::int16_t>(p + 2 * i) / 32768.0;
        }
      } else if (format == 3 && bits == 32) {
        audio.samples.resize(size / 4);
        for (std::size_t i = 0; i < audio.samples.size(); ++i) {
          audio.samples[i] = detail::load_le<float>(p + 4 * i);
        }
      } else {
        throw fail("unsupported sample format " + std::to_string(format) + "/" +
                   std::to_string(bits) + " bit");
      }
      return audio;
    }
    pos = body + size + (size & 1u);
  }
  throw fail("no data chunk");
}

/// Headerless float32 little-endian samples.
inline std::vector<double> read_raw_f32(const std::filesystem::path& path) {
  const auto bytes = detail::read_all(path);
  require(bytes.size() % 4 == 0, ErrorKind::Truncated,
          path.string() + ": size " + std::to_string(bytes.size()) + " is not a multiple of 4");
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::load_le<float>(bytes.data() + 4 * i);
  return out;
}

inline void write_wav_pcm16(const std::filesystem::path& path, std::span<const double> samples,
                            std::uint32_t sample_rate) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  const auto put32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  const auto put16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out.write("RIFF", 4);
  put32(36 + data_bytes);
  out.write("WAVEfmt ", 8);
  put32(16);
  put16(1);
  put16(1);
  put32(sample_rate);
  put32(sample_rate * 2);
  put16(2);
  put16(16);
  out.write("data", 4);
  put32(data_bytes);
  for (double s : samples) {
    const double clamped = std::max(-1.0, std::min(1.0, s));
    put16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(clamped * 32767.0))));
  }
}

inline void write_raw_f32(const std::filesystem::path& path, std::span<const double> samples) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  for (double s : samples) {
    const auto f = static_cast<float>(s);
    out.write(reinterpret_cast<const char*>(&f), 4);
  }
}

/// Dispatch on extension: .wav is parsed, anything else is raw float32 at
/// `raw_sample_rate`.
inline Audio read_audio(const std::filesystem::path& path, double raw_sample_rate) {
  if (path.extension() == ".wav" || path.extension() == ".WAV") return read_wav(path);
  return Audio{read_raw_f32(path), raw_sample_rate};
}

}  // namespace newsreel::media
