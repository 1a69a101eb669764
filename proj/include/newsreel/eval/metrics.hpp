// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "newsreel/core/timeline.hpp"
#include "newsreel/error.hpp"

namespace newsreel::eval {

inline constexpr std::array<double, 3> kTimeThresholds{1.0, 3.0, 5.0};
inline constexpr std::array<double, 3> kIouThresholds{0.5, 0.7, 0.9};
inline constexpr double kDurationTolerance = 0.5;

struct MatchPair {
  std::size_t gt;
  std::size_t pred;
  double score;
};

using PairScore = std::function<double(const Chapter& pred, const Chapter& gt)>;

inline double start_score(const Chapter& pred, const Chapter& gt) {
  return -std::abs(pred.interval.start() - gt.interval.start());
}

inline double iou_score(const Chapter& pred, const Chapter& gt) {
  return interval_iou(pred.interval, gt.interval);
}

/**
 * @brief Greedy one-to-one matching by descending score.
 *
 * Pairs scoring below `min_score` never match. Equal scores are broken by
 * (gt index, pred index) ascending.
 */
inline std::vector<MatchPair> match_one_to_one(const ChapterList& pred, const ChapterList& gt,
                                               const PairScore& score, double min_score) {
  std::vector<MatchPair> candidates;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const double s = score(pred.chapters[p], gt.chapters[g]);
      if (s >= min_score) candidates.push_back({g, p, s});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const MatchPair& a, const MatchPair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.gt != b.gt) return a.gt < b.gt;
    return a.pred < b.pred;
  });
  std::vector<bool> gt_used(gt.size(), false), pred_used(pred.size(), false);
  std::vector<MatchPair> out;
  for (const auto& c : candidates) {
    if (gt_used[c.gt] || pred_used[c.pred]) continue;
    gt_used[c.gt] = pred_used[c.pred] = true;
    out.push_back(c);
  }
  return out;
}

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Score score_from_counts(std::size_t hits, std::size_t n_pred, std::size_t n_gt) {
  Score s;
  s.precision = n_pred ? static_cast<double>(hits) / static_cast<double>(n_pred) : 0.0;
  s.recall = n_gt ? static_cast<double>(hits) / static_cast<double>(n_gt) : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

/// Hit counts per criterion; precision/recall/F1 are derived on demand so that
/// pooled (micro-averaged) reports stay exact.
struct MetricReport {
  std::size_t n_pred = 0;
  std::size_t n_gt = 0;
  std::array<std::size_t, 3> time_hits{};  // at kTimeThresholds
  std::array<std::size_t, 3> iou_hits{};   // at kIouThresholds

  Score time(std::size_t k) const { return score_from_counts(time_hits[k], n_pred, n_gt); }
  Score iou(std::size_t k) const { return score_from_counts(iou_hits[k], n_pred, n_gt); }

  bool operator==(const MetricReport&) const = default;
};

/// Time criterion matches chapter starts (the first chapter's start at 0
/// always matches); IoU criterion matches whole chapter intervals.
inline MetricReport evaluate(const ChapterList& pred, const ChapterList& gt) {
  require(std::abs(pred.video_duration - gt.video_duration) <= kDurationTolerance,
          ErrorKind::InvalidArgument,
          "prediction covers " + std::to_string(pred.video_duration) + " s but ground truth covers " +
              std::to_string(gt.video_duration) + " s");
  MetricReport r;
  r.n_pred = pred.size();
  r.n_gt = gt.size();
  for (std::size_t k = 0; k < kTimeThresholds.size(); ++k) {
    r.time_hits[k] = match_one_to_one(pred, gt, start_score, -kTimeThresholds[k]).size();
  }
  for (std::size_t k = 0; k < kIouThresholds.size(); ++k) {
    r.iou_hits[k] = match_one_to_one(pred, gt, iou_score, kIouThresholds[k]).size();
  }
  return r;
}

/// Micro-average: pool counts over videos.
inline MetricReport aggregate(std::span<const MetricReport> reports) {
  require(!reports.empty(), ErrorKind::InvalidArgument, "cannot aggregate zero reports");
  MetricReport total;
  for (const auto& r : reports) {
    total.n_pred += r.n_pred;
    total.n_gt += r.n_gt;
    for (std::size_t k = 0; k < 3; ++k) {
      total.time_hits[k] += r.time_hits[k];
      total.iou_hits[k] += r.iou_hits[k];
    }
  }
  return total;
}

inline std::string time_key(std::size_t k) {
  return std::to_string(static_cast<int>(kTimeThresholds[k])) + "s";
}

inline std::string iou_key(std::size_t k) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%.1f", kIouThresholds[k]);
  return buf;
}

inline nlohmann::json report_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["n_pred"] = r.n_pred;
  j["n_gt"] = r.n_gt;
  const auto entry = [](std::size_t hits, const Score& s) {
    return nlohmann::json{{"hits", hits}, {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  };
  for (std::size_t k = 0; k < 3; ++k) {
    j["time"][time_key(k)] = entry(r.time_hits[k], r.time(k));
    j["iou"][iou_key(k)] = entry(r.iou_hits[k], r.iou(k));
  }
  return j;
}

/// Percentages in the column order F1@5s F1@3s F1@1s P@1s R@1s F1@0.5
/// F1@0.7 F1@0.9 P@0.9 R@0.9.
inline std::string report_table(const MetricReport& r, const std::string& row_label = "model") {
  const std::array<std::string, 10> headers{"F1@5s", "F1@3s", "F1@1s", "P@1s",  "R@1s",
                                            "F1@0.5", "F1@0.7", "F1@0.9", "P@0.9", "R@0.9"};
  const std::array<double, 10> values{r.time(2).f1,     r.time(1).f1,     r.time(0).f1,     r.time(0).precision,
                                      r.time(0).recall, r.iou(0).f1,      r.iou(1).f1,      r.iou(2).f1,
                                      r.iou(2).precision, r.iou(2).recall};
  const std::size_t label_width = std::max<std::size_t>(12, row_label.size() + 2);
  std::string out(label_width, ' ');
  out.replace(0, 12, "Architecture");
  for (const auto& h : headers) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%8s", h.c_str());
    out += buf;
  }
  out += "\n" + row_label + std::string(label_width - row_label.size(), ' ');
  for (double v : values) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%8.2f", 100.0 * v);
    out += buf;
  }
  return out + "\n";
}

}  // namespace newsreel::eval
