// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "newsreel/core/timeline.hpp"
#include "newsreel/error.hpp"
#include "newsreel/ingest/embedding_store.hpp"
#include "newsreel/ingest/formats.hpp"
#include "newsreel/ingest/video_record.hpp"
#include "newsreel/random.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::ingest {

/**
 * @brief Parameters of a planted-structure newscast corpus.
 *
 * The defaults are a desk-scale stand-in for a real newscast archive: about
 * 60 shots (roughly six minutes) and 8 chapters per video instead of 41
 * minutes and 35 stories, keeping the same shots-per-chapter order of
 * magnitude.
 */
struct SyntheticSpec {
  std::size_t n_videos = 30;
  std::size_t shots_min = 50;
  std::size_t shots_max = 70;
  std::size_t chapters_min = 6;
  std::size_t chapters_max = 10;
  std::size_t min_chapter_shots = 3;
  std::size_t visual_dim = 64;
  std::size_t text_dim = 48;
  std::size_t speaker_dim = 21;
  std::size_t audio_dim = 20;
  double separation = 1.0;
  double noise = 1.0;
  /// Corpus-wide story categories; adjacent chapters never share one. 0 draws
  /// an independent mean per chapter.
  std::size_t topics = 4;
  /// Per-chapter deviation from its topic mean, relative to separation.
  double chapter_jitter = 0.5;
  /// Leading share of each modality's dims that carry the chapter mean; the
  /// rest are pure per-shot noise.
  double informative_fraction = 0.5;
  bool anchor_pattern = true;
  /// Probability that a non-anchor shot has no diarized speaker.
  double silence_prob = 0.15;
  /// Probability that a non-anchor shot carries a face flag (anchors always do).
  double face_prob = 0.3;
  double fps = 25.0;
  std::size_t shot_frames_min = 50;
  std::size_t shot_frames_max = 250;
  double mfcc_step = 0.5;
  std::uint64_t seed = 0;

  void validate() const {
    require(n_videos >= 1, ErrorKind::InvalidArgument, "synthetic corpus needs n_videos >= 1");
    require(shots_min >= 1 && shots_min <= shots_max, ErrorKind::InvalidArgument,
            "synthetic shots range must satisfy 1 <= min <= max");
    require(chapters_min >= 1 && chapters_min <= chapters_max, ErrorKind::InvalidArgument,
            "synthetic chapters range must satisfy 1 <= min <= max");
    require(min_chapter_shots >= 1, ErrorKind::InvalidArgument, "min_chapter_shots must be >= 1");
    require(chapters_max * min_chapter_shots <= shots_min, ErrorKind::InvalidArgument,
            "chapters_max * min_chapter_shots must not exceed shots_min");
    require(visual_dim >= 1 && text_dim >= 1 && audio_dim >= 1, ErrorKind::InvalidArgument,
            "synthetic modality dims must be >= 1");
    require(speaker_dim == 21, ErrorKind::InvalidArgument, "speaker one-hot width is fixed at 21");
    require(separation >= 0.0, ErrorKind::InvalidArgument, "separation must be >= 0");
    require(noise >= 0.0, ErrorKind::InvalidArgument, "noise must be >= 0");
    require(topics != 1, ErrorKind::InvalidArgument, "topics must be 0 or >= 2 so adjacent chapters can differ");
    require(chapter_jitter >= 0.0, ErrorKind::InvalidArgument, "chapter_jitter must be >= 0");
    require(informative_fraction > 0.0 && informative_fraction <= 1.0, ErrorKind::InvalidArgument,
            "informative_fraction must lie in (0, 1]");
    require(silence_prob >= 0.0 && silence_prob < 1.0, ErrorKind::InvalidArgument,
            "silence_prob must lie in [0, 1)");
    require(face_prob >= 0.0 && face_prob <= 1.0, ErrorKind::InvalidArgument, "face_prob must lie in [0, 1]");
    require(fps > 0.0, ErrorKind::InvalidArgument, "fps must be positive");
    require(shot_frames_min >= 1 && shot_frames_min <= shot_frames_max, ErrorKind::InvalidArgument,
            "shot frame range must satisfy 1 <= min <= max");
    require(mfcc_step > 0.0 && mfcc_step * fps <= static_cast<double>(shot_frames_min), ErrorKind::InvalidArgument,
            "mfcc_step must be positive and no longer than the shortest shot");
  }
};

/// Ground truth planted in one generated video.
struct SyntheticVideo {
  std::string id;
  std::vector<Shot> shots;
  std::vector<std::size_t> chapter_of_shot;
  std::vector<bool> anchor;
  ChapterList chapters;
};

namespace detail {

/// N(0, scale^2) in the first ceil(fraction * n) entries, zero elsewhere.
inline std::vector<float> gaussian_vector(Rng& rng, std::size_t n, double scale, double fraction = 1.0) {
  std::vector<float> v(n, 0.0f);
  const auto informative = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  for (std::size_t k = 0; k < std::min(n, informative); ++k) v[k] = static_cast<float>(rng.normal(0.0, scale));
  return v;
}

inline void append_sample(std::vector<float>& dst, const std::vector<float>& mean, Rng& rng, double noise) {
  for (float m : mean) dst.push_back(static_cast<float>(m + rng.normal(0.0, noise)));
}

/// Chapter sizes: min_chapter_shots each, remainder spread uniformly.
inline std::vector<std::size_t> chapter_sizes(Rng& rng, std::size_t shots, std::size_t chapters, std::size_t min_size) {
  std::vector<std::size_t> sizes(chapters, min_size);
  for (std::size_t k = chapters * min_size; k < shots; ++k)
    ++sizes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(chapters) - 1))];
  return sizes;
}

}  // namespace detail

inline std::string synthetic_video_id(std::size_t index) {
  std::string n = std::to_string(index);
  return "video_" + std::string(n.size() < 3 ? 3 - n.size() : 0, '0') + n;
}

/**
 * @brief Writes one planted video under `dir` and returns its ground truth.
 *
 * Visual, text and MFCC rows are the chapter's latent mean (drawn
 * N(0, separation^2) per dimension) plus N(0, noise^2). With the anchor
 * pattern on, the first shot of every chapter shows the anchor (a visual
 * mean shared by the whole corpus) and is voiced by speaker 0; other shots rotate
 * between two per-chapter speakers from 1..19 or are silent.
 */
inline SyntheticVideo generate_synthetic_video(const SyntheticSpec& spec, std::size_t index,
                                               const std::filesystem::path& dir) {
  Rng rng = Rng(spec.seed).fork(index + 1);
  SyntheticVideo v;
  v.id = synthetic_video_id(index);
  const auto n_shots = static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::int64_t>(spec.shots_min), static_cast<std::int64_t>(spec.shots_max)));
  const auto n_chapters = static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::int64_t>(spec.chapters_min), static_cast<std::int64_t>(spec.chapters_max)));
  const auto sizes = detail::chapter_sizes(rng, n_shots, n_chapters, spec.min_chapter_shots);

  std::size_t frame = 0;
  for (std::size_t i = 0; i < n_shots; ++i) {
    const auto len = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(spec.shot_frames_min),
                                                              static_cast<std::int64_t>(spec.shot_frames_max)));
    v.shots.push_back(Shot{i, TimeInterval(static_cast<double>(frame) / spec.fps,
                                           static_cast<double>(frame + len) / spec.fps)});
    frame += len;
  }
  const double duration = v.shots.back().interval.end();
  v.chapters.video_duration = duration;
  std::size_t first = 0;
  for (std::size_t c = 0; c < n_chapters; ++c) {
    const std::size_t last = first + sizes[c] - 1;
    v.chapters.chapters.push_back(Chapter{
        TimeInterval(v.shots[first].interval.start(), v.shots[last].interval.end()), "story_" + std::to_string(c)});
    for (std::size_t i = first; i <= last; ++i) {
      v.chapter_of_shot.push_back(c);
      v.anchor.push_back(spec.anchor_pattern && i == first);
    }
    first = last + 1;
  }

  // Corpus-wide draws: the anchor's look and the topic means.
  const double f = spec.informative_fraction;
  Rng shared = Rng(spec.seed).fork(0);
  const auto anchor_mean = detail::gaussian_vector(shared, spec.visual_dim, spec.separation, f);
  std::vector<std::array<std::vector<float>, 3>> topic_means;
  for (std::size_t k = 0; k < spec.topics; ++k) {
    topic_means.push_back({detail::gaussian_vector(shared, spec.visual_dim, spec.separation, f),
                           detail::gaussian_vector(shared, spec.text_dim, spec.separation, f),
                           detail::gaussian_vector(shared, spec.audio_dim, spec.separation, f)});
  }

  std::vector<std::vector<float>> visual_mean, text_mean, audio_mean;
  std::vector<std::array<int, 2>> reporters;
  std::size_t previous_topic = spec.topics;
  for (std::size_t c = 0; c < n_chapters; ++c) {
    if (spec.topics == 0) {
      visual_mean.push_back(detail::gaussian_vector(rng, spec.visual_dim, spec.separation, f));
      text_mean.push_back(detail::gaussian_vector(rng, spec.text_dim, spec.separation, f));
      audio_mean.push_back(detail::gaussian_vector(rng, spec.audio_dim, spec.separation, f));
    } else {
      std::size_t topic = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(spec.topics) - 2));
      if (previous_topic < spec.topics && topic >= previous_topic) ++topic;
      if (previous_topic == spec.topics) topic = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(spec.topics) - 1));
      previous_topic = topic;
      const double jitter = spec.separation * spec.chapter_jitter;
      const auto around = [&](const std::vector<float>& base, std::size_t n) {
        auto v = detail::gaussian_vector(rng, n, jitter, f);
        for (std::size_t k = 0; k < n; ++k) v[k] += base[k];
        return v;
      };
      visual_mean.push_back(around(topic_means[topic][0], spec.visual_dim));
      text_mean.push_back(around(topic_means[topic][1], spec.text_dim));
      audio_mean.push_back(around(topic_means[topic][2], spec.audio_dim));
    }
    reporters.push_back({static_cast<int>(rng.uniform_int(1, kMaxSpeakers - 1)),
                         static_cast<int>(rng.uniform_int(1, kMaxSpeakers - 1))});
  }

  EmbeddingStore visual{static_cast<std::uint32_t>(n_shots), static_cast<std::uint32_t>(spec.visual_dim), {}};
  std::vector<DiarSegment> diarization;
  std::vector<bool> face_flags;
  for (std::size_t i = 0; i < n_shots; ++i) {
    const std::size_t c = v.chapter_of_shot[i];
    detail::append_sample(visual.values, v.anchor[i] ? anchor_mean : visual_mean[c], rng, spec.noise);
    const bool silent = !v.anchor[i] && rng.uniform() < spec.silence_prob;
    if (v.anchor[i]) {
      diarization.push_back({0, v.shots[i].interval});
    } else if (!silent) {
      diarization.push_back({reporters[c][rng.uniform() < 0.5 ? 0 : 1], v.shots[i].interval});
    }
    face_flags.push_back(v.anchor[i] || rng.uniform() < spec.face_prob);
  }

  // Text segments tile each chapter with runs of 1-3 shots.
  EmbeddingStore text{0, static_cast<std::uint32_t>(spec.text_dim), {}};
  std::vector<TextSegment> segments;
  for (std::size_t i = 0; i < n_shots;) {
    const std::size_t c = v.chapter_of_shot[i];
    std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(1, 3));
    while (j > i + 1 && (j > n_shots || v.chapter_of_shot[j - 1] != c)) --j;
    segments.push_back({static_cast<int>(segments.size()),
                        TimeInterval(v.shots[i].interval.start(), v.shots[j - 1].interval.end())});
    detail::append_sample(text.values, text_mean[c], rng, spec.noise);
    ++text.count;
    i = j;
  }

  // Frame-level MFCC stand-ins at a fixed step, drawn from the chapter's audio mean.
  EmbeddingStore mfcc{0, static_cast<std::uint32_t>(spec.audio_dim), {}};
  std::size_t shot = 0;
  for (std::size_t t = 0; static_cast<double>(t) * spec.mfcc_step < duration; ++t) {
    const double time = static_cast<double>(t) * spec.mfcc_step;
    while (shot + 1 < n_shots && v.shots[shot].interval.end() <= time) ++shot;
    detail::append_sample(mfcc.values, audio_mean[v.chapter_of_shot[shot]], rng, spec.noise);
    ++mfcc.count;
  }

  std::filesystem::create_directories(dir);
  write_embedding_store(dir / "visual.embs", visual);
  write_embedding_store(dir / "text.embs", text);
  write_embedding_store(dir / "mfcc.embs", mfcc);
  write_json_file(dir / "text_segments.json", text_segments_to_json(segments));
  write_json_file(dir / "diarization.json", diarization_to_json(diarization));
  write_chapters_csv(dir / "chapters.csv", v.chapters);

  json manifest;
  manifest["id"] = v.id;
  manifest["duration_s"] = duration;
  manifest["fps"] = spec.fps;
  manifest["shots"] = shots_to_json(v.shots);
  manifest["mfcc_frame_step_s"] = spec.mfcc_step;
  manifest["face_flags"] = face_flags;
  manifest["files"] = {{"visual", "visual.embs"},
                       {"text", "text.embs"},
                       {"text_segments", "text_segments.json"},
                       {"diarization", "diarization.json"},
                       {"mfcc", "mfcc.embs"},
                       {"chapters", "chapters.csv"}};
  write_json_file(dir / "manifest.json", manifest);
  return v;
}

/**
 * @brief Writes a corpus: `corpus.json` plus `videos/<id>/...` per video.
 *
 * Output bytes depend only on `spec`.
 */
inline std::vector<SyntheticVideo> generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec && std::filesystem::is_directory(out_dir), ErrorKind::Io,
          "cannot create output directory " + out_dir.string());
  std::vector<SyntheticVideo> videos;
  json listing = json::array();
  for (std::size_t i = 0; i < spec.n_videos; ++i) {
    const auto id = synthetic_video_id(i);
    videos.push_back(generate_synthetic_video(spec, i, out_dir / "videos" / id));
    listing.push_back("videos/" + id + "/manifest.json");
  }
  write_json_file(out_dir / "corpus.json", json{{"seed", spec.seed}, {"videos", listing}});
  return videos;
}

/// Manifest paths listed by a corpus directory or corpus.json file.
inline std::vector<std::filesystem::path> corpus_manifests(const std::filesystem::path& corpus) {
  const auto file = std::filesystem::is_directory(corpus) ? corpus / "corpus.json" : corpus;
  const json doc = read_json_file(file);
  require(doc.is_object() && doc.contains("videos") && doc["videos"].is_array(), ErrorKind::Malformed,
          file.string() + ": expected an object with a 'videos' list");
  std::vector<std::filesystem::path> out;
  for (const auto& v : doc["videos"]) {
    require(v.is_string(), ErrorKind::Malformed, file.string() + ": 'videos' entries must be strings");
    out.push_back(detail::resolve(file.parent_path(), v.get<std::string>()));
  }
  return out;
}

inline std::vector<VideoRecord> load_corpus(const std::filesystem::path& corpus) {
  std::vector<VideoRecord> records;
  for (const auto& m : corpus_manifests(corpus)) records.push_back(load_video_record(m));
  return records;
}

}  // namespace newsreel::ingest
