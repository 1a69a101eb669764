// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "newsreel/chaptering/distance.hpp"
#include "newsreel/core/timeline.hpp"
#include "newsreel/error.hpp"

namespace newsreel::chaptering {

/// Indices of shots that open a chapter: 0, plus every i+1 with D(i, i+1) > tau.
inline std::vector<std::size_t> boundary_shots(const DistanceMatrix& d, double tau) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    if (d(i, i + 1) > tau) starts.push_back(i + 1);
  }
  return starts;
}

inline ChapterList segment_by_threshold(const DistanceMatrix& d, double tau, std::span<const Shot> shots,
                                        double video_duration) {
  require(d.size() == shots.size(), ErrorKind::DimensionMismatch,
          "distance matrix covers " + std::to_string(d.size()) + " shots, got " +
              std::to_string(shots.size()));
  const auto starts = boundary_shots(d, tau);
  return chapters_from_boundaries(shots, starts, video_duration);
}

}  // namespace newsreel::chaptering
