// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "newsreel/align/align.hpp"
#include "newsreel/chaptering/distance.hpp"
#include "newsreel/chaptering/segment.hpp"
#include "newsreel/core/timeline.hpp"
#include "newsreel/error.hpp"
#include "newsreel/random.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::chaptering {

/// Threshold segmentation of the untrained, concatenated shot features.
inline ChapterList zero_shot_segment(const align::FeatureSequence& normalized_sequence, double tau,
                                     DistanceKind kind = DistanceKind::Cosine) {
  const auto d = distance_matrix(normalized_sequence.features, kind);
  return segment_by_threshold(d, tau, normalized_sequence.shots, normalized_sequence.duration);
}

inline ChapterList zero_shot_segment(const ingest::VideoRecord& record, const align::NormalizerStats* norm,
                                     double tau, const align::AlignOptions& options = {},
                                     DistanceKind kind = DistanceKind::Cosine) {
  return zero_shot_segment(align::assemble_sequence(record, norm, options), tau, kind);
}

struct KMeansResult {
  std::vector<std::size_t> assignment;
  Tensor centroids;
  std::vector<std::size_t> sizes;
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

/// One Lloyd run from a k-means++ initialization drawn from `rng`.
inline KMeansResult lloyd(const Tensor& points, std::size_t k, Rng& rng, std::size_t max_iterations) {
  const std::size_t n = points.rows();
  const std::size_t dims = points.cols();
  KMeansResult r;
  r.centroids = Tensor::matrix(k, dims);
  std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1))};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], detail::squared_distance(points.row_span(i), points.row_span(chosen.back())));
      total += nearest[i];
    }
    std::size_t next = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (next = 0; next + 1 < n; ++next) {
        target -= nearest[next];
        if (target < 0.0) break;
      }
    } else {
      // All points coincide with chosen centroids: take the first unused index.
      while (std::find(chosen.begin(), chosen.end(), next) != chosen.end()) ++next;
    }
    chosen.push_back(next);
  }
  for (std::size_t c = 0; c < k; ++c) {
    const auto src = points.row_span(chosen[c]);
    std::copy(src.begin(), src.end(), r.centroids.row_span(c).begin());
  }

  r.assignment.assign(n, k);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = detail::squared_distance(points.row_span(i), r.centroids.row_span(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.assignment[i] != best) {
        r.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Tensor sums = Tensor::matrix(k, dims);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = points.row_span(i);
      auto dst = sums.row_span(r.assignment[i]);
      for (std::size_t d = 0; d < dims; ++d) dst[d] += row[d];
      ++counts[r.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      auto dst = r.centroids.row_span(c);
      const auto src = sums.row_span(c);
      for (std::size_t d = 0; d < dims; ++d) dst[d] = src[d] / static_cast<double>(counts[c]);
    }
  }
  r.sizes.assign(k, 0);
  for (auto a : r.assignment) ++r.sizes[a];
  return r;
}

inline double inertia(const Tensor& points, const KMeansResult& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i)
    s += squared_distance(points.row_span(i), r.centroids.row_span(r.assignment[i]));
  return s;
}

}  // namespace detail

/**
 * @brief Lloyd's k-means with k-means++ seeding drawn from `seed`.
 *
 * Runs `restarts` independent initializations and keeps the one with the
 * lowest within-cluster sum of squares (the earliest on ties). Each run stops
 * when assignments no longer change or after `max_iterations`. Empty
 * clusters keep their previous centroid.
 */
inline KMeansResult kmeans(const Tensor& points, std::size_t k, std::uint64_t seed,
                           std::size_t max_iterations = 100, std::size_t restarts = 10) {
  require(k >= 1, ErrorKind::InvalidArgument, "k-means needs k >= 1");
  require(restarts >= 1, ErrorKind::InvalidArgument, "k-means needs restarts >= 1");
  const std::size_t n = points.rows();
  require(n >= k, ErrorKind::InvalidArgument,
          "k-means with k=" + std::to_string(k) + " needs at least k points, got " + std::to_string(n));
  Rng rng(seed);
  KMeansResult best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (std::size_t run = 0; run < restarts; ++run) {
    Rng run_rng = rng.fork(run);
    auto r = detail::lloyd(points, k, run_rng, max_iterations);
    const double cost = detail::inertia(points, r);
    if (cost < best_inertia) {
      best_inertia = cost;
      best = std::move(r);
    }
  }
  return best;
}

/// Which shots belong to the most populated cluster (ties: lowest cluster id).
inline std::vector<bool> anchor_shots(const Tensor& visual, const std::vector<bool>* face_flags, std::size_t k,
                                      std::uint64_t seed) {
  require(k >= 1, ErrorKind::InvalidArgument, "anchor detection needs k >= 1");
  const std::size_t n = visual.rows();
  require(!face_flags || face_flags->size() == n, ErrorKind::CountMismatch, "one face flag per shot expected");
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i)
    if (!face_flags || (*face_flags)[i]) candidates.push_back(i);
  require(candidates.size() >= k, ErrorKind::InvalidArgument,
          "anchor detection has " + std::to_string(candidates.size()) + " candidate shots for k=" +
              std::to_string(k));
  Tensor points = Tensor::matrix(candidates.size(), visual.cols());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto src = visual.row_span(candidates[c]);
    std::copy(src.begin(), src.end(), points.row_span(c).begin());
  }
  const auto clusters = kmeans(points, k, seed);
  const auto anchor = static_cast<std::size_t>(
      std::max_element(clusters.sizes.begin(), clusters.sizes.end()) - clusters.sizes.begin());
  std::vector<bool> is_anchor(n, false);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (clusters.assignment[c] == anchor) is_anchor[candidates[c]] = true;
  return is_anchor;
}

/**
 * @brief Anchor-person baseline.
 *
 * Clusters the visual embeddings of candidate shots (face-flagged shots, or
 * all shots without flags), takes the largest cluster as the anchor, and
 * opens a chapter at every anchor shot not directly preceded by another
 * anchor shot.
 */
inline ChapterList anchor_segment(const Tensor& visual, std::span<const Shot> shots, double duration,
                                  const std::vector<bool>* face_flags, std::size_t k, std::uint64_t seed = 0) {
  require(visual.rows() == shots.size(), ErrorKind::CountMismatch,
          "visual embeddings have " + std::to_string(visual.rows()) + " rows for " +
              std::to_string(shots.size()) + " shots");
  const auto is_anchor = anchor_shots(visual, face_flags, k, seed);
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 1; i < shots.size(); ++i)
    if (is_anchor[i] && !is_anchor[i - 1]) starts.push_back(i);
  return chapters_from_boundaries(shots, starts, duration);
}

inline ChapterList anchor_segment(const ingest::VideoRecord& record, std::size_t k, std::uint64_t seed = 0) {
  const auto* flags = record.face_flags ? &*record.face_flags : nullptr;
  return anchor_segment(record.visual.to_tensor(), record.shots, record.duration, flags, k, seed);
}

}  // namespace newsreel::chaptering
