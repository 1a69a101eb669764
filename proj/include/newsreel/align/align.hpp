// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsreel/core/timeline.hpp"
#include "newsreel/error.hpp"
#include "newsreel/ingest/embedding_store.hpp"
#include "newsreel/ingest/formats.hpp"
#include "newsreel/ingest/video_record.hpp"
#include "newsreel/media/audio_io.hpp"
#include "newsreel/media/mfcc.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::align {

/// 20 diarized speakers plus one silence slot.
inline constexpr std::size_t kSpeakerSlots = ingest::kMaxSpeakers + 1;
inline constexpr std::size_t kSilenceSlot = ingest::kMaxSpeakers;
inline constexpr double kStdFloor = 1e-6;

/// nullopt means silence.
using SpeakerAssignment = std::optional<int>;

/// Block widths of the concatenated per-shot vector, always laid out as
/// visual | text | speaker | audio.
struct FeatureLayout {
  std::size_t visual = 1024;
  std::size_t text = 768;
  std::size_t speaker = kSpeakerSlots;
  std::size_t audio = 20;

  std::size_t total() const { return visual + text + speaker + audio; }
  std::size_t text_offset() const { return visual; }
  std::size_t speaker_offset() const { return visual + text; }
  std::size_t audio_offset() const { return visual + text + speaker; }
  bool is_speaker_dim(std::size_t d) const {
    return d >= speaker_offset() && d < audio_offset();
  }

  bool operator==(const FeatureLayout&) const = default;
};

struct ShotFeatureVector {
  std::vector<double> visual;
  std::vector<double> text;
  std::vector<double> speaker;
  std::vector<double> audio;

  std::vector<double> concatenated() const {
    std::vector<double> out;
    out.reserve(visual.size() + text.size() + speaker.size() + audio.size());
    for (const auto* part : {&visual, &text, &speaker, &audio}) {
      out.insert(out.end(), part->begin(), part->end());
    }
    return out;
  }
};

/// Per-shot features of one video as a T x D matrix in shot order.
struct FeatureSequence {
  std::string video_id;
  Tensor features;
  FeatureLayout layout;
  std::vector<Shot> shots;
  std::optional<ChapterLabels> labels;
  double duration = 0.0;
  std::optional<ChapterList> chapters;

  std::size_t length() const { return features.rows(); }
};

/// Speaker with the largest total speaking time inside the shot; ties go to
/// the lower id, no overlap at all means silence.
inline SpeakerAssignment speaker_for_shot(std::span<const ingest::DiarSegment> segments,
                                          const TimeInterval& shot) {
  std::array<double, ingest::kMaxSpeakers> talk{};
  for (const auto& seg : segments) {
    if (seg.speaker_id < 0 || seg.speaker_id >= ingest::kMaxSpeakers) continue;
    talk[static_cast<std::size_t>(seg.speaker_id)] += overlap(shot, seg.interval);
  }
  int best = -1;
  double best_time = 0.0;
  for (int s = 0; s < ingest::kMaxSpeakers; ++s) {
    if (talk[static_cast<std::size_t>(s)] > best_time) {
      best_time = talk[static_cast<std::size_t>(s)];
      best = s;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

inline std::vector<double> encode_speaker(SpeakerAssignment speaker) {
  std::vector<double> out(kSpeakerSlots, 0.0);
  if (!speaker) {
    out[kSilenceSlot] = 1.0;
    return out;
  }
  require(*speaker >= 0 && *speaker < ingest::kMaxSpeakers, ErrorKind::InvalidArgument,
          "speaker id " + std::to_string(*speaker) + " exceeds the diarization cap of " +
              std::to_string(ingest::kMaxSpeakers));
  out[static_cast<std::size_t>(*speaker)] = 1.0;
  return out;
}

/// Embedding of the transcript segment overlapping the shot the most, or a
/// zero vector when the shot falls in silence.
inline std::vector<double> text_embedding_for_shot(const ingest::EmbeddingStore& segment_embeddings,
                                                   std::span<const ingest::TextSegment> segments,
                                                   const TimeInterval& shot) {
  require(segment_embeddings.count == segments.size(), ErrorKind::CountMismatch,
          "text store has " + std::to_string(segment_embeddings.count) + " rows for " +
              std::to_string(segments.size()) + " segments");
  double best = 0.0;
  std::optional<std::size_t> best_idx;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double ov = overlap(shot, segments[i].interval);
    if (ov > best) {
      best = ov;
      best_idx = i;
    }
  }
  if (!best_idx) return std::vector<double>(segment_embeddings.dim, 0.0);
  return segment_embeddings.row_as_double(*best_idx);
}

inline std::vector<double> visual_embedding_for_shot(const ingest::EmbeddingStore& frame_embeddings,
                                                     std::size_t shot_index, std::size_t expected_dim) {
  require(frame_embeddings.dim == expected_dim, ErrorKind::DimensionMismatch,
          "visual store dim " + std::to_string(frame_embeddings.dim) + " differs from declared " +
              std::to_string(expected_dim));
  return frame_embeddings.row_as_double(shot_index);
}

/// Per-dimension z-score statistics; the speaker block is never rescaled.
struct NormalizerStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  FeatureLayout layout;

  void apply(Tensor& features) const {
    require(features.cols() == mean.size(), ErrorKind::DimensionMismatch,
            "normalizer fitted on " + std::to_string(mean.size()) + " dims, features have " +
                std::to_string(features.cols()));
    for (std::size_t r = 0; r < features.rows(); ++r) {
      auto row = features.row_span(r);
      for (std::size_t d = 0; d < row.size(); ++d) {
        if (layout.is_speaker_dim(d)) continue;
        row[d] = (row[d] - mean[d]) / stddev[d];
      }
    }
  }
};

inline NormalizerStats fit_normalizer(std::span<const FeatureSequence> train) {
  require(!train.empty(), ErrorKind::InvalidArgument, "cannot fit a normalizer on zero sequences");
  const std::size_t dims = train.front().features.cols();
  NormalizerStats stats;
  stats.layout = train.front().layout;
  stats.mean.assign(dims, 0.0);
  stats.stddev.assign(dims, 0.0);
  std::size_t count = 0;
  for (const auto& seq : train) {
    require(seq.features.cols() == dims, ErrorKind::DimensionMismatch,
            "sequence " + seq.video_id + " has " + std::to_string(seq.features.cols()) +
                " dims, expected " + std::to_string(dims));
    for (std::size_t r = 0; r < seq.length(); ++r) {
      const auto row = seq.features.row_span(r);
      for (std::size_t d = 0; d < dims; ++d) stats.mean[d] += row[d];
    }
    count += seq.length();
  }
  require(count > 0, ErrorKind::InvalidArgument, "training sequences contain no shots");
  for (double& m : stats.mean) m /= static_cast<double>(count);
  for (const auto& seq : train) {
    for (std::size_t r = 0; r < seq.length(); ++r) {
      const auto row = seq.features.row_span(r);
      for (std::size_t d = 0; d < dims; ++d) {
        const double c = row[d] - stats.mean[d];
        stats.stddev[d] += c * c;
      }
    }
  }
  for (std::size_t d = 0; d < dims; ++d) {
    stats.stddev[d] = std::max(kStdFloor, std::sqrt(stats.stddev[d] / static_cast<double>(count)));
    if (stats.layout.is_speaker_dim(d)) {
      stats.mean[d] = 0.0;
      stats.stddev[d] = 1.0;
    }
  }
  return stats;
}

struct AlignOptions {
  media::MfccParams mfcc;
  /// Declared visual width; 0 accepts whatever the store holds.
  std::size_t visual_dim = 0;
};

/// MFCC frames for a record: the precomputed store when present, otherwise
/// computed from the audio file.
inline media::MfccMatrix record_mfcc(const ingest::VideoRecord& record, const media::MfccParams& params) {
  if (record.mfcc) return *record.mfcc;
  require(record.files.audio.has_value(), ErrorKind::MissingFile,
          record.id + ": no MFCC store and no audio file");
  const auto audio = media::read_audio(*record.files.audio, params.sample_rate);
  auto p = params;
  p.sample_rate = audio.sample_rate;
  return media::compute_mfcc(audio.samples, p);
}

inline ShotFeatureVector shot_features(const ingest::VideoRecord& record, const media::MfccMatrix& mfcc,
                                       std::size_t shot_index, std::size_t visual_dim) {
  const auto& shot = record.shots[shot_index];
  ShotFeatureVector v;
  v.visual = visual_embedding_for_shot(record.visual, shot_index, visual_dim);
  v.text = text_embedding_for_shot(record.text, record.text_segments, shot.interval);
  v.speaker = encode_speaker(speaker_for_shot(record.diarization, shot.interval));
  v.audio = media::pool_mfcc(mfcc, shot.interval);
  return v;
}

/**
 * @brief Build the per-shot feature matrix of one video.
 *
 * Labels are attached when the record carries ground-truth chapters. When
 * `norm` is given the visual, text and audio blocks are z-normalized.
 */
inline FeatureSequence assemble_sequence(const ingest::VideoRecord& record,
                                         const NormalizerStats* norm = nullptr,
                                         const AlignOptions& options = {}) {
  const auto mfcc = record_mfcc(record, options.mfcc);
  const std::size_t visual_dim = options.visual_dim ? options.visual_dim : record.visual.dim;
  FeatureSequence seq;
  seq.video_id = record.id;
  seq.shots = record.shots;
  seq.duration = record.duration;
  seq.chapters = record.chapters;
  seq.layout = FeatureLayout{visual_dim, record.text.dim, kSpeakerSlots, mfcc.coefficients.cols()};
  seq.features = Tensor::matrix(record.shots.size(), seq.layout.total());
  for (std::size_t i = 0; i < record.shots.size(); ++i) {
    const auto row = shot_features(record, mfcc, i, visual_dim).concatenated();
    std::copy(row.begin(), row.end(), seq.features.row_span(i).begin());
  }
  require(seq.features.all_finite(), ErrorKind::Validation, record.id + ": non-finite features");
  if (norm) norm->apply(seq.features);
  if (record.chapters) seq.labels = assign_chapter_labels(record.shots, *record.chapters);
  return seq;
}

inline FeatureSequence normalized(FeatureSequence seq, const NormalizerStats& norm) {
  norm.apply(seq.features);
  return seq;
}

}  // namespace newsreel::align
