// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "newsreel/align/align.hpp"
#include "newsreel/chaptering/distance.hpp"
#include "newsreel/chaptering/segment.hpp"
#include "newsreel/error.hpp"
#include "newsreel/eval/metrics.hpp"
#include "newsreel/fusion/model.hpp"

namespace newsreel::chaptering {

/// 0.05, 0.10, ..., 0.95.
inline std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 19; ++k) grid.push_back(k * 0.05);
  return grid;
}

/// A validation video reduced to what threshold selection needs.
struct SweepItem {
  DistanceMatrix distances;
  std::vector<Shot> shots;
  double duration = 0.0;
  ChapterList ground_truth;
};

inline double mean_f1_at_iou50(std::span<const SweepItem> items, double tau) {
  double total = 0.0;
  for (const auto& item : items) {
    const auto pred = segment_by_threshold(item.distances, tau, item.shots, item.duration);
    total += eval::evaluate(pred, item.ground_truth).iou(0).f1;
  }
  return total / static_cast<double>(items.size());
}

/// Grid value maximizing mean per-video F1@IoU0.5; ties go to the smaller tau.
inline double sweep_threshold(std::span<const SweepItem> items, std::span<const double> grid) {
  require(!items.empty(), ErrorKind::InvalidArgument, "threshold sweep needs a non-empty validation set");
  require(!grid.empty(), ErrorKind::InvalidArgument, "threshold sweep needs a non-empty grid");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  double best_tau = sorted.front();
  double best_f1 = -1.0;
  for (double tau : sorted) {
    const double f1 = mean_f1_at_iou50(items, tau);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_tau = tau;
    }
  }
  return best_tau;
}

inline SweepItem sweep_item(DistanceMatrix d, const align::FeatureSequence& seq) {
  require(seq.chapters.has_value(), ErrorKind::InvalidArgument,
          "validation video " + seq.video_id + " has no ground-truth chapters");
  return {std::move(d), seq.shots, seq.duration, *seq.chapters};
}

/// Distances from the trained model's eval-mode features.
inline std::vector<SweepItem> model_sweep_items(const fusion::ModelParameters& model,
                                                std::span<const align::FeatureSequence> val) {
  std::vector<SweepItem> items;
  for (const auto& seq : val) items.push_back(sweep_item(distance_matrix(fusion::forward(model, seq.features)), seq));
  return items;
}

/// Distances straight from the (normalized) input features.
inline std::vector<SweepItem> raw_sweep_items(std::span<const align::FeatureSequence> val,
                                              DistanceKind kind = DistanceKind::Cosine) {
  std::vector<SweepItem> items;
  for (const auto& seq : val) items.push_back(sweep_item(distance_matrix(seq.features, kind), seq));
  return items;
}

inline double sweep_threshold(const fusion::ModelParameters& model, std::span<const align::FeatureSequence> val,
                              std::span<const double> grid) {
  require(!val.empty(), ErrorKind::InvalidArgument, "threshold sweep needs a non-empty validation set");
  const auto items = model_sweep_items(model, val);
  return sweep_threshold(items, grid);
}

}  // namespace newsreel::chaptering
