// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "newsreel/chaptering/distance.hpp"
#include "newsreel/chaptering/sweep.hpp"
#include "newsreel/error.hpp"
#include "newsreel/fusion/model.hpp"
#include "newsreel/fusion/train.hpp"
#include "newsreel/ingest/formats.hpp"
#include "newsreel/ingest/split.hpp"
#include "newsreel/ingest/synthetic.hpp"
#include "newsreel/media/mfcc.hpp"
#include "newsreel/media/shot_detector.hpp"

namespace newsreel::config {

using nlohmann::json;

/// Every tunable of the pipeline in one document.
struct RunConfig {
  media::MfccParams mfcc;
  media::ShotDetectorParams shots;
  fusion::ModelSpec model;
  fusion::TrainConfig train;
  ingest::SyntheticSpec synthetic;
  /// 30 synthetic videos split 20 / 5 / 5.
  ingest::SplitRatios split{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0};
  /// Fixed threshold; when absent, `sweep-tau` / `train` select one on validation.
  std::optional<double> tau;
  std::vector<double> tau_grid = chaptering::default_threshold_grid();
  chaptering::DistanceKind zero_shot_distance = chaptering::DistanceKind::Cosine;
  std::size_t anchor_clusters = 4;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  /// The single seed every random component derives from.
  void set_seed(std::uint64_t s) {
    seed = s;
    model.seed = s;
    train.seed = s;
    synthetic.seed = s;
  }

  void validate() const {
    mfcc.validate();
    shots.validate();
    model.validate();
    train.validate();
    synthetic.validate();
    for (double r : split) require(r > 0.0, ErrorKind::InvalidArgument, "split ratios must be positive");
    require(std::abs(split[0] + split[1] + split[2] - 1.0) <= 1e-9, ErrorKind::InvalidArgument,
            "split ratios must sum to 1");
    if (tau) require(*tau > 0.0 && *tau < 1.0, ErrorKind::InvalidArgument, "tau must lie in (0, 1)");
    require(!tau_grid.empty(), ErrorKind::InvalidArgument, "tau_grid must not be empty");
    for (double t : tau_grid) require(t > 0.0 && t < 1.0, ErrorKind::InvalidArgument, "tau_grid values must lie in (0, 1)");
    require(anchor_clusters >= 1, ErrorKind::InvalidArgument, "anchor_clusters must be >= 1");
    require(jobs >= 1, ErrorKind::InvalidArgument, "jobs must be >= 1");
  }
};

namespace detail {

using Setter = std::function<void(const json&)>;

template <typename T>
Setter bind(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

/// Applies `fields` to every key of `obj`; unknown keys are an error.
inline void apply_object(const json& obj, const std::string& where, const std::map<std::string, Setter>& fields) {
  require(obj.is_object(), ErrorKind::Malformed, where + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    const auto it = fields.find(key);
    require(it != fields.end(), ErrorKind::Malformed, where + ": unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Malformed, where + "." + key + ": " + e.what());
    }
  }
}

inline chaptering::DistanceKind distance_from_string(const std::string& s) {
  if (s == "cosine") return chaptering::DistanceKind::Cosine;
  if (s == "euclidean") return chaptering::DistanceKind::Euclidean;
  throw Error(ErrorKind::InvalidArgument, "unknown distance '" + s + "' (expected cosine or euclidean)");
}

inline std::string to_string(chaptering::DistanceKind k) {
  return k == chaptering::DistanceKind::Cosine ? "cosine" : "euclidean";
}

}  // namespace detail

/// Overlays the keys present in `doc` onto `cfg` and validates the result.
inline void apply_config(RunConfig& cfg, const json& doc, const std::string& where = "config") {
  using detail::bind;
  std::map<std::string, detail::Setter> top{
      {"mfcc",
       [&](const json& j) {
         auto& m = cfg.mfcc;
         detail::apply_object(j, where + ".mfcc",
                              {{"sample_rate", bind(m.sample_rate)},
                               {"frame_length", bind(m.frame_length)},
                               {"hop_length", bind(m.hop_length)},
                               {"mel_bands", bind(m.mel_bands)},
                               {"num_coefficients", bind(m.num_coefficients)},
                               {"log_floor", bind(m.log_floor)}});
       }},
      {"shots",
       [&](const json& j) {
         auto& s = cfg.shots;
         detail::apply_object(j, where + ".shots",
                              {{"window", bind(s.window)},
                               {"threshold", bind(s.threshold)},
                               {"min_shot", bind(s.min_shot)},
                               {"fps", bind(s.fps)}});
       }},
      {"model",
       [&](const json& j) {
         auto& m = cfg.model;
         detail::apply_object(
             j, where + ".model",
             {{"architecture",
               [&](const json& v) { m.architecture = fusion::architecture_from_string(v.get<std::string>()); }},
              {"input_dim", bind(m.input_dim)},
              {"hidden_dim", bind(m.hidden_dim)},
              {"layers", bind(m.layers)},
              {"dnn_dims", bind(m.dnn_dims)},
              {"projection_dim", bind(m.projection_dim)},
              {"dropout", bind(m.dropout)}});
       }},
      {"train",
       [&](const json& j) {
         auto& t = cfg.train;
         detail::apply_object(j, where + ".train",
                              {{"epochs", bind(t.epochs)},
                               {"batch_size", bind(t.batch_size)},
                               {"base_lr", bind(t.base_lr)},
                               {"history_tau", bind(t.history_tau)},
                               {"grad_clip", bind(t.grad_clip)},
                               {"grad_check", bind(t.grad_check)}});
       }},
      {"synthetic",
       [&](const json& j) {
         auto& s = cfg.synthetic;
         detail::apply_object(j, where + ".synthetic",
                              {{"n_videos", bind(s.n_videos)},
                               {"shots_min", bind(s.shots_min)},
                               {"shots_max", bind(s.shots_max)},
                               {"chapters_min", bind(s.chapters_min)},
                               {"chapters_max", bind(s.chapters_max)},
                               {"min_chapter_shots", bind(s.min_chapter_shots)},
                               {"visual_dim", bind(s.visual_dim)},
                               {"text_dim", bind(s.text_dim)},
                               {"speaker_dim", bind(s.speaker_dim)},
                               {"audio_dim", bind(s.audio_dim)},
                               {"separation", bind(s.separation)},
                               {"noise", bind(s.noise)},
                               {"topics", bind(s.topics)},
                               {"chapter_jitter", bind(s.chapter_jitter)},
                               {"informative_fraction", bind(s.informative_fraction)},
                               {"anchor_pattern", bind(s.anchor_pattern)},
                               {"silence_prob", bind(s.silence_prob)},
                               {"face_prob", bind(s.face_prob)},
                               {"fps", bind(s.fps)},
                               {"shot_frames_min", bind(s.shot_frames_min)},
                               {"shot_frames_max", bind(s.shot_frames_max)},
                               {"mfcc_step", bind(s.mfcc_step)}});
       }},
      {"split", bind(cfg.split)},
      {"tau",
       [&](const json& v) {
         if (v.is_null())
           cfg.tau.reset();
         else
           cfg.tau = v.get<double>();
       }},
      {"tau_grid", bind(cfg.tau_grid)},
      {"zero_shot_distance",
       [&](const json& v) { cfg.zero_shot_distance = detail::distance_from_string(v.get<std::string>()); }},
      {"anchor_clusters", bind(cfg.anchor_clusters)},
      {"seed", bind(cfg.seed)},
      {"jobs", bind(cfg.jobs)},
  };
  detail::apply_object(doc, where, top);
  cfg.set_seed(cfg.seed);
  cfg.validate();
}

inline RunConfig load_config(const std::filesystem::path& path) {
  require(std::filesystem::is_regular_file(path), ErrorKind::MissingFile, "config file not found: " + path.string());
  RunConfig cfg;
  apply_config(cfg, ingest::read_json_file(path), path.string());
  return cfg;
}

inline json config_to_json(const RunConfig& c) {
  json j;
  j["mfcc"] = {{"sample_rate", c.mfcc.sample_rate}, {"frame_length", c.mfcc.frame_length},
               {"hop_length", c.mfcc.hop_length},   {"mel_bands", c.mfcc.mel_bands},
               {"num_coefficients", c.mfcc.num_coefficients}, {"log_floor", c.mfcc.log_floor}};
  j["shots"] = {{"window", c.shots.window},
                {"threshold", c.shots.threshold},
                {"min_shot", c.shots.min_shot},
                {"fps", c.shots.fps}};
  j["model"] = fusion::spec_to_json(c.model);
  j["model"].erase("seed");
  j["train"] = {{"epochs", c.train.epochs},       {"batch_size", c.train.batch_size},
                {"base_lr", c.train.base_lr},
                {"history_tau", c.train.history_tau}, {"grad_clip", c.train.grad_clip},
                {"grad_check", c.train.grad_check}};
  const auto& s = c.synthetic;
  j["synthetic"] = {{"n_videos", s.n_videos},
                    {"shots_min", s.shots_min},
                    {"shots_max", s.shots_max},
                    {"chapters_min", s.chapters_min},
                    {"chapters_max", s.chapters_max},
                    {"min_chapter_shots", s.min_chapter_shots},
                    {"visual_dim", s.visual_dim},
                    {"text_dim", s.text_dim},
                    {"speaker_dim", s.speaker_dim},
                    {"audio_dim", s.audio_dim},
                    {"separation", s.separation},
                    {"noise", s.noise},
                    {"topics", s.topics},
                    {"chapter_jitter", s.chapter_jitter},
                    {"informative_fraction", s.informative_fraction},
                    {"anchor_pattern", s.anchor_pattern},
                    {"silence_prob", s.silence_prob},
                    {"face_prob", s.face_prob},
                    {"fps", s.fps},
                    {"shot_frames_min", s.shot_frames_min},
                    {"shot_frames_max", s.shot_frames_max},
                    {"mfcc_step", s.mfcc_step}};
  j["split"] = c.split;
  j["tau"] = c.tau ? json(*c.tau) : json(nullptr);
  j["tau_grid"] = c.tau_grid;
  j["zero_shot_distance"] = detail::to_string(c.zero_shot_distance);
  j["anchor_clusters"] = c.anchor_clusters;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  return j;
}

}  // namespace newsreel::config
