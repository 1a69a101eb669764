// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "newsreel/core/timeline.hpp"
#include "newsreel/error.hpp"
#include "newsreel/ingest/embedding_store.hpp"
#include "newsreel/ingest/formats.hpp"
#include "newsreel/media/mfcc.hpp"

namespace newsreel::ingest {

/// Allowed disagreement between the declared duration and the last shot end.
inline constexpr double kDurationTolerance = 0.5;

struct VideoFiles {
  std::filesystem::path visual;
  std::filesystem::path text;
  std::filesystem::path text_segments;
  std::filesystem::path diarization;
  std::optional<std::filesystem::path> audio;
  std::optional<std::filesystem::path> mfcc;
  std::optional<std::filesystem::path> chapters;
};

/**
 * @brief One video with every modality loaded and cross-checked.
 *
 * The visual store holds one row per shot (the central frame was selected
 * when the store was produced). The text store holds one row per text
 * segment. MFCC frames come either from a precomputed frame-level store
 * (`mfcc`, frame t stamped at t * mfcc_frame_step) or from raw audio that
 * align computes on demand.
 */
struct VideoRecord {
  std::string id;
  double duration = 0.0;
  double fps = 25.0;
  std::vector<Shot> shots;
  std::optional<ChapterList> chapters;
  std::optional<std::vector<bool>> face_flags;
  VideoFiles files;
  std::filesystem::path manifest_path;

  EmbeddingStore visual;
  EmbeddingStore text;
  std::vector<TextSegment> text_segments;
  std::vector<DiarSegment> diarization;
  std::optional<media::MfccMatrix> mfcc;
  double mfcc_frame_step = 0.01;
};

namespace detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& rel) {
  std::filesystem::path p(rel);
  return p.is_absolute() ? p : base / p;
}

inline void require_file(const std::filesystem::path& p, const std::string& role) {
  require(std::filesystem::is_regular_file(p), ErrorKind::MissingFile,
          role + " file not found: " + p.string());
}

}  // namespace detail

inline media::MfccMatrix mfcc_from_store(const EmbeddingStore& store, double frame_step) {
  media::MfccMatrix m;
  m.coefficients = store.to_tensor();
  m.timestamps.resize(store.count);
  for (std::size_t t = 0; t < store.count; ++t) m.timestamps[t] = static_cast<double>(t) * frame_step;
  return m;
}

inline VideoRecord load_video_record(const std::filesystem::path& manifest_path) {
  detail::require_file(manifest_path, "manifest");
  const json doc = read_json_file(manifest_path);
  const std::string ctx = manifest_path.string();
  require(doc.is_object(), ErrorKind::Malformed, ctx + ": manifest must be a JSON object");
  const auto base = manifest_path.parent_path();

  VideoRecord rec;
  rec.manifest_path = manifest_path;
  require(doc.contains("id") && doc["id"].is_string(), ErrorKind::Malformed, ctx + ": missing string 'id'");
  rec.id = doc["id"].get<std::string>();
  rec.duration = detail::number_field(doc, "duration_s", ctx);
  require(rec.duration > 0.0, ErrorKind::Validation, ctx + ": duration_s must be positive");
  rec.fps = detail::number_field(doc, "fps", ctx);
  require(rec.fps > 0.0, ErrorKind::Validation, ctx + ": fps must be positive");
  require(doc.contains("shots"), ErrorKind::Malformed, ctx + ": missing 'shots'");
  rec.shots = parse_shots(doc["shots"], ctx);
  require(!rec.shots.empty(), ErrorKind::Validation, ctx + ": video has no shots");
  const double last_end = rec.shots.back().interval.end();
  require(std::abs(last_end - rec.duration) <= kDurationTolerance, ErrorKind::Validation,
          ctx + ": last shot ends at " + std::to_string(last_end) + " but duration_s is " +
              std::to_string(rec.duration));
  if (doc.contains("mfcc_frame_step_s")) {
    rec.mfcc_frame_step = detail::number_field(doc, "mfcc_frame_step_s", ctx);
    require(rec.mfcc_frame_step > 0.0, ErrorKind::Validation, ctx + ": mfcc_frame_step_s must be positive");
  }

  require(doc.contains("files") && doc["files"].is_object(), ErrorKind::Malformed,
          ctx + ": missing object 'files'");
  const auto& files = doc["files"];
  const auto path_of = [&](const char* key) -> std::optional<std::filesystem::path> {
    if (!files.contains(key)) return std::nullopt;
    require(files[key].is_string(), ErrorKind::Malformed, ctx + ": files." + key + " must be a string");
    return detail::resolve(base, files[key].get<std::string>());
  };
  const auto required_path = [&](const char* key) {
    auto p = path_of(key);
    require(p.has_value(), ErrorKind::Malformed, ctx + ": missing files." + key);
    detail::require_file(*p, key);
    return *p;
  };
  rec.files.visual = required_path("visual");
  rec.files.text = required_path("text");
  rec.files.text_segments = required_path("text_segments");
  rec.files.diarization = required_path("diarization");
  rec.files.audio = path_of("audio");
  rec.files.mfcc = path_of("mfcc");
  rec.files.chapters = path_of("chapters");
  require(rec.files.audio || rec.files.mfcc, ErrorKind::Malformed,
          ctx + ": files needs either 'audio' or 'mfcc'");
  if (rec.files.audio) detail::require_file(*rec.files.audio, "audio");
  if (rec.files.mfcc) detail::require_file(*rec.files.mfcc, "mfcc");
  if (rec.files.chapters) detail::require_file(*rec.files.chapters, "chapters");

  rec.visual = read_embedding_store(rec.files.visual);
  require(rec.visual.count == rec.shots.size(), ErrorKind::CountMismatch,
          rec.files.visual.string() + ": visual store has " + std::to_string(rec.visual.count) +
              " rows but the manifest lists " + std::to_string(rec.shots.size()) + " shots");
  rec.text = read_embedding_store(rec.files.text);
  rec.text_segments = read_text_segments(rec.files.text_segments);
  require(rec.text.count == rec.text_segments.size(), ErrorKind::CountMismatch,
          rec.files.text.string() + ": text store has " + std::to_string(rec.text.count) +
              " rows but " + rec.files.text_segments.string() + " lists " +
              std::to_string(rec.text_segments.size()) + " segments");
  rec.diarization = read_diarization(rec.files.diarization);
  if (rec.files.mfcc) {
    const auto store = read_embedding_store(*rec.files.mfcc);
    require(store.count > 0, ErrorKind::Validation, rec.files.mfcc->string() + ": MFCC store is empty");
    rec.mfcc = mfcc_from_store(store, rec.mfcc_frame_step);
  }
  if (rec.files.chapters) {
    rec.chapters = read_partition_csv(*rec.files.chapters, rec.duration);
  }
  if (doc.contains("face_flags")) {
    require(doc["face_flags"].is_array(), ErrorKind::Malformed, ctx + ": face_flags must be a list");
    std::vector<bool> flags;
    for (const auto& f : doc["face_flags"]) {
      require(f.is_boolean(), ErrorKind::Malformed, ctx + ": face_flags entries must be booleans");
      flags.push_back(f.get<bool>());
    }
    require(flags.size() == rec.shots.size(), ErrorKind::CountMismatch,
            ctx + ": face_flags has " + std::to_string(flags.size()) + " entries for " +
                std::to_string(rec.shots.size()) + " shots");
    rec.face_flags = std::move(flags);
  }
  return rec;
}

}  // namespace newsreel::ingest
