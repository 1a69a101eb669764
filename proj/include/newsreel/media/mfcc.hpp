// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "newsreel/core/timeline.hpp"
#include "newsreel/error.hpp"
#include "newsreel/media/fft.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::media {

struct MfccParams {
  double sample_rate = 16000.0;
  std::size_t frame_length = 400;  // 25 ms
  std::size_t hop_length = 160;    // 10 ms
  std::size_t mel_bands = 40;
  std::size_t num_coefficients = 20;
  double log_floor = 1e-10;

  std::size_t fft_size() const { return next_power_of_two(frame_length); }

  void validate() const {
    require(sample_rate > 0.0 && std::isfinite(sample_rate), ErrorKind::InvalidArgument,
            "mfcc sample_rate must be positive");
    require(hop_length >= 1 && frame_length >= hop_length, ErrorKind::InvalidArgument,
            "mfcc requires frame_length >= hop_length >= 1");
    require(mel_bands >= 1 && num_coefficients >= 1 && num_coefficients <= mel_bands,
            ErrorKind::InvalidArgument, "mfcc requires 1 <= num_coefficients <= mel_bands");
    require(log_floor > 0.0, ErrorKind::InvalidArgument, "mfcc log_floor must be positive");
  }
};

/// Frames x coefficients, plus the start time of every frame.
struct MfccMatrix {
  Tensor coefficients;
  std::vector<double> timestamps;

  std::size_t frames() const { return coefficients.rows(); }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// mel_bands + 2 edge frequencies, equally spaced on the mel scale over [0, sr/2].
inline std::vector<double> mel_edge_frequencies(const MfccParams& p) {
  const double top = hz_to_mel(p.sample_rate / 2.0);
  std::vector<double> edges(p.mel_bands + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(p.mel_bands + 1));
  }
  return edges;
}

inline std::vector<double> mel_center_frequencies(const MfccParams& p) {
  const auto edges = mel_edge_frequencies(p);
  return {edges.begin() + 1, edges.end() - 1};
}

/// Triangular filters on FFT bins, each scaled to unit area: bands x (fft/2+1).
inline Tensor mel_filterbank(const MfccParams& p) {
  p.validate();
  const std::size_t n_fft = p.fft_size();
  const std::size_t bins = n_fft / 2 + 1;
  const auto edges = mel_edge_frequencies(p);
  Tensor fb = Tensor::matrix(p.mel_bands, bins);
  for (std::size_t m = 0; m < p.mel_bands; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double height = 2.0 / (hi - lo);
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * p.sample_rate / static_cast<double>(n_fft);
      const double rising = (f - lo) / (mid - lo);
      const double falling = (hi - f) / (hi - mid);
      fb(m, k) = std::max(0.0, std::min(rising, falling)) * height;
    }
  }
  return fb;
}

/// Orthonormal DCT-II basis truncated to the first `coefficients` rows.
inline Tensor dct_matrix(std::size_t coefficients, std::size_t bands) {
  Tensor m = Tensor::matrix(coefficients, bands);
  const double n = static_cast<double>(bands);
  for (std::size_t c = 0; c < coefficients; ++c) {
    const double scale = c == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t b = 0; b < bands; ++b) {
      m(c, b) = scale * std::cos(std::numbers::pi * static_cast<double>(c) *
                                 (static_cast<double>(b) + 0.5) / n);
    }
  }
  return m;
}

/// Periodic Hann window.
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

inline std::size_t mfcc_frame_count(std::size_t samples, const MfccParams& p) {
  return samples < p.frame_length ? 0 : 1 + (samples - p.frame_length) / p.hop_length;
}

/// Mel filterbank energies per frame (before the log), frames x bands.
inline Tensor mel_energies(std::span<const double> samples, const MfccParams& p) {
  p.validate();
  require(samples.size() >= p.frame_length, ErrorKind::InvalidArgument,
          "signal has " + std::to_string(samples.size()) + " samples, need at least " +
              std::to_string(p.frame_length));
  for (double s : samples) {
    require(std::isfinite(s), ErrorKind::InvalidArgument, "audio contains non-finite samples");
  }
  const auto fb = mel_filterbank(p);
  const auto window = hann_window(p.frame_length);
  const std::size_t frames = mfcc_frame_count(samples.size(), p);
  const std::size_t bins = fb.cols();
  Tensor out = Tensor::matrix(frames, p.mel_bands);
  std::vector<double> frame(p.frame_length);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t offset = t * p.hop_length;
    for (std::size_t i = 0; i < p.frame_length; ++i) frame[i] = samples[offset + i] * window[i];
    const auto power = power_spectrum(frame, p.fft_size());
    for (std::size_t m = 0; m < p.mel_bands; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < bins; ++k) e += fb(m, k) * power[k];
      out(t, m) = e;
    }
  }
  return out;
}

/**
 * @brief Frame, window, power spectrum, mel filterbank, log, DCT-II.
 *
 * No padding is applied: frame t covers samples [t*hop, t*hop + frame_length)
 * and is timestamped at its first sample.
 */
inline MfccMatrix compute_mfcc(std::span<const double> samples, const MfccParams& p) {
  const Tensor energies = mel_energies(samples, p);
  const Tensor dct = dct_matrix(p.num_coefficients, p.mel_bands);
  const std::size_t frames = energies.rows();
  MfccMatrix out;
  out.coefficients = Tensor::matrix(frames, p.num_coefficients);
  out.timestamps.resize(frames);
  std::vector<double> logmel(p.mel_bands);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t m = 0; m < p.mel_bands; ++m) {
      logmel[m] = std::log(std::max(energies(t, m), p.log_floor));
    }
    for (std::size_t c = 0; c < p.num_coefficients; ++c) {
      double acc = 0.0;
      for (std::size_t m = 0; m < p.mel_bands; ++m) acc += dct(c, m) * logmel[m];
      out.coefficients(t, c) = acc;
    }
    out.timestamps[t] = static_cast<double>(t * p.hop_length) / p.sample_rate;
  }
  return out;
}

/// Mean MFCC row over frames whose timestamp falls in [shot.start, shot.end).
inline std::vector<double> pool_mfcc(const MfccMatrix& m, const TimeInterval& shot) {
  const std::size_t dims = m.coefficients.cols();
  std::vector<double> acc(dims, 0.0);
  std::size_t count = 0;
  for (std::size_t t = 0; t < m.frames(); ++t) {
    const double ts = m.timestamps[t];
    if (ts < shot.start() || ts >= shot.end()) continue;
    const auto row = m.coefficients.row_span(t);
    for (std::size_t c = 0; c < dims; ++c) acc[c] += row[c];
    ++count;
  }
  require(count > 0, ErrorKind::Validation,
          "no MFCC frame falls inside [" + std::to_string(shot.start()) + ", " +
              std::to_string(shot.end()) + ")");
  for (double& v : acc) v /= static_cast<double>(count);
  return acc;
}

}  // namespace newsreel::media
