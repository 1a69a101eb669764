// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "newsreel/core/timeline.hpp"
#include "newsreel/csv.hpp"
#include "newsreel/error.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::media {

/// Mean HSV of one frame. Hue in degrees [0, 360), saturation/value in [0, 1].
struct FrameDescriptor {
  std::size_t frame_index = 0;
  double hue = 0.0;
  double saturation = 0.0;
  double value = 0.0;
};

struct ShotDetectorParams {
  std::size_t window = 10;
  double threshold = 0.05;
  std::size_t min_shot = 15;  // frames
  double fps = 25.0;

  void validate() const {
    require(window > 0, ErrorKind::InvalidArgument, "shot detector window must be positive");
    require(threshold > 0.0, ErrorKind::InvalidArgument, "shot detector threshold must be positive");
    require(fps > 0.0, ErrorKind::InvalidArgument, "fps must be positive");
  }
};

inline double wrap_degrees(double deg) {
  double h = std::fmod(deg, 360.0);
  if (h < 0.0) h += 360.0;
  return h >= 360.0 ? 0.0 : h;
}

/// Absolute angular difference in degrees, in [0, 180].
inline double hue_difference(double a, double b) {
  const double d = std::abs(wrap_degrees(a) - wrap_degrees(b));
  return std::min(d, 360.0 - d);
}

/// Equal-weight L1 over (circular hue / 180, saturation, value); range [0, 1].
inline double descriptor_distance(const FrameDescriptor& a, const FrameDescriptor& b) {
  return (hue_difference(a.hue, b.hue) / 180.0 + std::abs(a.saturation - b.saturation) +
          std::abs(a.value - b.value)) /
         3.0;
}

/// Circular mean of hues (angle of the mean unit vector); 0 when the
/// resultant vanishes.
inline double circular_mean_degrees(std::span<const double> hues) {
  double s = 0.0, c = 0.0;
  for (double h : hues) {
    const double rad = h * std::numbers::pi / 180.0;
    s += std::sin(rad);
    c += std::cos(rad);
  }
  if (std::hypot(s, c) < 1e-12 * static_cast<double>(std::max<std::size_t>(1, hues.size()))) {
    return 0.0;
  }
  return wrap_degrees(std::atan2(s, c) * 180.0 / std::numbers::pi);
}

inline FrameDescriptor mean_descriptor(std::span<const FrameDescriptor> frames) {
  std::vector<double> hues;
  hues.reserve(frames.size());
  FrameDescriptor out;
  for (const auto& f : frames) {
    hues.push_back(f.hue);
    out.saturation += f.saturation;
    out.value += f.value;
  }
  const double n = static_cast<double>(frames.size());
  out.saturation /= n;
  out.value /= n;
  out.hue = circular_mean_degrees(hues);
  return out;
}

/// RGB in [0,1] to (hue degrees, saturation, value). Achromatic pixels get hue 0.
inline void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  v = mx;
  s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) {
    h = 0.0;
  } else if (mx == r) {
    h = 60.0 * std::fmod((g - b) / delta, 6.0);
  } else if (mx == g) {
    h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    h = 60.0 * ((r - g) / delta + 4.0);
  }
  h = wrap_degrees(h);
}

/// Per-pixel HSV, then arithmetic mean of S and V and circular mean of H.
/// `rgb` has shape {height, width, 3}.
inline FrameDescriptor frame_descriptor(const Tensor& rgb, std::size_t frame_index = 0) {
  require(rgb.rank() == 3 && rgb.shape()[2] == 3, ErrorKind::InvalidArgument,
          "frame must have shape HxWx3, got " + shape_string(rgb));
  const std::size_t pixels = rgb.shape()[0] * rgb.shape()[1];
  require(pixels > 0, ErrorKind::InvalidArgument, "frame is empty");
  std::vector<double> hues(pixels);
  FrameDescriptor out;
  out.frame_index = frame_index;
  for (std::size_t p = 0; p < pixels; ++p) {
    double h, s, v;
    rgb_to_hsv(rgb[3 * p], rgb[3 * p + 1], rgb[3 * p + 2], h, s, v);
    hues[p] = h;
    out.saturation += s;
    out.value += v;
  }
  out.saturation /= static_cast<double>(pixels);
  out.value /= static_cast<double>(pixels);
  out.hue = circular_mean_degrees(hues);
  return out;
}

/**
 * @brief Windowed shot boundary detector.
 *
 * Frame t opens a new shot when its descriptor is farther than `threshold`
 * from the mean descriptor of the preceding `window` frames of the current
 * shot, and the current shot is already `min_shot` frames long. Comparing
 * against a trailing mean lets gradual fades accumulate enough change to
 * trigger, which a frame-to-frame comparison (window 1) would miss.
 */
inline std::vector<std::size_t> detect_boundaries(std::span<const FrameDescriptor> frames,
                                                  const ShotDetectorParams& p) {
  p.validate();
  std::vector<std::size_t> starts{0};
  std::size_t last = 0;
  for (std::size_t t = 1; t < frames.size(); ++t) {
    if (t - last < p.min_shot) continue;
    const std::size_t from = std::max(last, t >= p.window ? t - p.window : 0);
    const auto reference = mean_descriptor(frames.subspan(from, t - from));
    if (descriptor_distance(frames[t], reference) > p.threshold) {
      starts.push_back(t);
      last = t;
    }
  }
  return starts;
}

inline std::vector<Shot> shots_from_boundaries(std::span<const std::size_t> starts,
                                               std::size_t n_frames, double fps) {
  std::vector<Shot> shots;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::size_t end = i + 1 < starts.size() ? starts[i + 1] : n_frames;
    shots.push_back({i, TimeInterval(static_cast<double>(starts[i]) / fps,
                                     static_cast<double>(end) / fps)});
  }
  return shots;
}

/// Shots covering every frame contiguously; timestamps are frame / fps.
inline std::vector<Shot> detect_shots(std::span<const FrameDescriptor> frames,
                                      const ShotDetectorParams& p) {
  p.validate();
  require(frames.size() >= p.window + 1, ErrorKind::InvalidArgument,
          "shot detection needs at least window+1 = " + std::to_string(p.window + 1) +
              " frames, got " + std::to_string(frames.size()));
  const auto starts = detect_boundaries(frames, p);
  return shots_from_boundaries(starts, frames.size(), p.fps);
}

/// CSV with header `frame_index,hue,saturation,value`, rows in frame order.
inline std::vector<FrameDescriptor> read_frame_descriptors(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  require(table.header.size() >= 4 && table.header[0] == "frame_index" && table.header[1] == "hue" &&
              table.header[2] == "saturation" && table.header[3] == "value",
          ErrorKind::Malformed, path.string() + ": expected header frame_index,hue,saturation,value");
  std::vector<FrameDescriptor> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto ctx = csv::where(path, table.line_numbers[r]);
    require(row.size() == 4, ErrorKind::Malformed, ctx + ": expected 4 fields");
    FrameDescriptor d;
    const double idx = csv::parse_double(row[0], ctx);
    require(idx == static_cast<double>(r), ErrorKind::Malformed,
            ctx + ": frame_index must equal the row position " + std::to_string(r));
    d.frame_index = r;
    d.hue = csv::parse_double(row[1], ctx);
    d.saturation = csv::parse_double(row[2], ctx);
    d.value = csv::parse_double(row[3], ctx);
    require(d.hue >= 0.0 && d.hue < 360.0 && d.saturation >= 0.0 && d.saturation <= 1.0 &&
                d.value >= 0.0 && d.value <= 1.0,
            ErrorKind::Malformed, ctx + ": descriptor out of range");
    out.push_back(d);
  }
  return out;
}

}  // namespace newsreel::media
