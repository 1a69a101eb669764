// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsreel/error.hpp"

namespace newsreel {

/// Tolerance (seconds) used when comparing boundaries that went through text.
inline constexpr double kTimeEpsilon = 1e-6;

/**
 * @brief Half-open span of time in seconds with strictly positive duration.
 */
class TimeInterval {
 public:
  TimeInterval(double start, double end) : start_(start), end_(end) {
    require(std::isfinite(start) && std::isfinite(end), ErrorKind::InvalidArgument,
            "interval bounds must be finite");
    require(start >= 0.0, ErrorKind::InvalidArgument,
            "interval start must be non-negative, got " + std::to_string(start));
    require(end > start, ErrorKind::InvalidArgument,
            "interval end must exceed start (" + std::to_string(start) + ", " +
                std::to_string(end) + ")");
  }

  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }
  double duration() const noexcept { return end_ - start_; }

  bool operator==(const TimeInterval&) const = default;

 private:
  double start_;
  double end_;
};

/// Length of the intersection of two intervals, 0 when disjoint.
inline double overlap(const TimeInterval& a, const TimeInterval& b) noexcept {
  return std::max(0.0, std::min(a.end(), b.end()) - std::max(a.start(), b.start()));
}

inline double overlap(const TimeInterval& a, double start, double end) noexcept {
  return std::max(0.0, std::min(a.end(), end) - std::max(a.start(), start));
}

inline double interval_iou(const TimeInterval& a, const TimeInterval& b) noexcept {
  const double inter = overlap(a, b);
  const double uni = a.duration() + b.duration() - inter;
  return inter / uni;
}

struct Shot {
  std::size_t index = 0;
  TimeInterval interval;
};

struct Chapter {
  TimeInterval interval;
  std::optional<std::string> title;
};

/// Ordered chapters meant to partition [0, video_duration]. Construction does
/// not validate; use validate_partition().
struct ChapterList {
  std::vector<Chapter> chapters;
  double video_duration = 0.0;

  std::size_t size() const noexcept { return chapters.size(); }
};

/**
 * @brief The shot -> chapter index function.
 *
 * Non-decreasing, starts at 0, and steps by at most one between consecutive
 * shots.
 */
class ChapterLabels {
 public:
  ChapterLabels() = default;

  explicit ChapterLabels(std::vector<int> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const int prev = i == 0 ? 0 : labels_[i - 1];
      const int step = labels_[i] - prev;
      require(step == 0 || (step == 1 && i > 0), ErrorKind::Validation,
              "chapter labels must start at 0 and step by 0 or 1 (position " +
                  std::to_string(i) + ")");
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }
  std::span<const int> values() const noexcept { return labels_; }
  int chapter_count() const noexcept { return labels_.empty() ? 0 : labels_.back() + 1; }

  bool operator==(const ChapterLabels&) const = default;

 private:
  std::vector<int> labels_;
};

enum class ViolationKind { Empty, Overlap, Gap, StartCoverage, EndCoverage };

struct PartitionViolation {
  ViolationKind kind;
  std::size_t index;  // chapter at which the violation is observed
  double from;        // offending span, e.g. the gap (10, 12)
  double to;
};

/// Empty result means the chapters partition [0, video_duration].
inline std::vector<PartitionViolation> validate_partition(const ChapterList& list,
                                                          double tolerance = kTimeEpsilon) {
  std::vector<PartitionViolation> out;
  const auto& cs = list.chapters;
  if (cs.empty()) {
    out.push_back({ViolationKind::Empty, 0, 0.0, list.video_duration});
    return out;
  }
  if (std::abs(cs.front().interval.start()) > tolerance) {
    out.push_back({ViolationKind::StartCoverage, 0, 0.0, cs.front().interval.start()});
  }
  for (std::size_t i = 1; i < cs.size(); ++i) {
    const double prev_end = cs[i - 1].interval.end();
    const double start = cs[i].interval.start();
    if (start < prev_end - tolerance) {
      out.push_back({ViolationKind::Overlap, i, start, prev_end});
    } else if (start > prev_end + tolerance) {
      out.push_back({ViolationKind::Gap, i, prev_end, start});
    }
  }
  const double last_end = cs.back().interval.end();
  if (std::abs(last_end - list.video_duration) > tolerance) {
    out.push_back({ViolationKind::EndCoverage, cs.size() - 1, last_end, list.video_duration});
  }
  return out;
}

/**
 * @brief Label each shot with the chapter it overlaps most.
 *
 * Ties go to the earlier chapter. Chapters that win no shot are skipped when
 * numbering, so the result always satisfies the ChapterLabels invariants.
 * Throws when a shot overlaps no chapter.
 */
inline ChapterLabels assign_chapter_labels(std::span<const Shot> shots, const ChapterList& gt) {
  std::vector<int> raw;
  raw.reserve(shots.size());
  std::size_t first_candidate = 0;
  for (const auto& shot : shots) {
    double best = 0.0;
    int best_idx = -1;
    for (std::size_t c = first_candidate; c < gt.chapters.size(); ++c) {
      const auto& ch = gt.chapters[c].interval;
      if (ch.start() >= shot.interval.end()) break;
      const double ov = overlap(shot.interval, ch);
      if (ov > best) {
        best = ov;
        best_idx = static_cast<int>(c);
      }
    }
    require(best_idx >= 0, ErrorKind::Validation,
            "shot " + std::to_string(shot.index) + " [" + std::to_string(shot.interval.start()) +
                ", " + std::to_string(shot.interval.end()) + ") lies outside every chapter");
    // Shots are sorted, so earlier chapters can never win again.
    first_candidate = static_cast<std::size_t>(best_idx);
    raw.push_back(best_idx);
  }
  std::vector<int> labels;
  labels.reserve(raw.size());
  int current = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i > 0 && raw[i] != raw[i - 1]) ++current;
    labels.push_back(current);
  }
  return ChapterLabels(std::move(labels));
}

/// Chapter i spans from the start of its first shot to the start of the next
/// chapter's first shot; the ends snap to 0 and video_duration.
inline ChapterList chapters_from_boundaries(std::span<const Shot> shots,
                                            std::span<const std::size_t> first_shots,
                                            double video_duration) {
  require(!shots.empty(), ErrorKind::InvalidArgument, "cannot build chapters from zero shots");
  std::vector<std::size_t> starts(first_shots.begin(), first_shots.end());
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  if (starts.empty() || starts.front() != 0) starts.insert(starts.begin(), 0);

  ChapterList out;
  out.video_duration = video_duration;
  for (std::size_t c = 0; c < starts.size(); ++c) {
    require(starts[c] < shots.size(), ErrorKind::InvalidArgument, "boundary index past last shot");
    const double start = c == 0 ? 0.0 : shots[starts[c]].interval.start();
    const double end = c + 1 == starts.size() ? video_duration : shots[starts[c + 1]].interval.start();
    out.chapters.push_back({TimeInterval(start, end), "chapter_" + std::to_string(c)});
  }
  return out;
}

/// Shot-level labels for a chapter list built from boundary indices.
inline ChapterLabels labels_from_boundaries(std::size_t n_shots,
                                            std::span<const std::size_t> first_shots) {
  std::vector<int> labels(n_shots, 0);
  std::vector<bool> is_start(n_shots, false);
  for (auto b : first_shots) {
    if (b < n_shots) is_start[b] = true;
  }
  int current = 0;
  for (std::size_t i = 0; i < n_shots; ++i) {
    if (i > 0 && is_start[i]) ++current;
    labels[i] = current;
  }
  return ChapterLabels(std::move(labels));
}

}  // namespace newsreel
