// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "newsreel/core/timeline.hpp"
#include "newsreel/csv.hpp"
#include "newsreel/error.hpp"

namespace newsreel::ingest {

using json = nlohmann::json;

/// Diarization output is capped at this many distinct speakers per file.
inline constexpr int kMaxSpeakers = 20;

struct DiarSegment {
  int speaker_id = 0;
  TimeInterval interval;
};

struct TranscriptWord {
  std::string word;
  TimeInterval interval;
  int segment_id = 0;
};

/// One ASR utterance: the unit whose embedding is handed to overlapping shots.
struct TextSegment {
  int segment_id = 0;
  TimeInterval interval;
};

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::MissingFile, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Malformed, path.string() + ": " + e.what());
  }
}

/// Stable, human-diffable JSON output (sorted keys, 2-space indent).
inline void write_json_file(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out << value.dump(2) << '\n';
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

namespace detail {

inline std::string item_context(const std::filesystem::path& path, std::size_t index) {
  return path.string() + " [item " + std::to_string(index) + "]";
}

inline double number_field(const json& obj, const char* key, const std::string& ctx) {
  require(obj.is_object() && obj.contains(key) && obj.at(key).is_number(), ErrorKind::Malformed,
          ctx + ": missing numeric field '" + key + "'");
  const double v = obj.at(key).get<double>();
  require(std::isfinite(v), ErrorKind::Malformed, ctx + ": field '" + key + "' is not finite");
  return v;
}

inline int int_field(const json& obj, const char* key, const std::string& ctx) {
  require(obj.is_object() && obj.contains(key) && obj.at(key).is_number_integer(),
          ErrorKind::Malformed, ctx + ": missing integer field '" + key + "'");
  return obj.at(key).get<int>();
}

inline TimeInterval interval_fields(const json& obj, const std::string& ctx) {
  const double start = number_field(obj, "start_s", ctx);
  const double end = number_field(obj, "end_s", ctx);
  try {
    return TimeInterval(start, end);
  } catch (const Error& e) {
    throw Error(ErrorKind::Validation, ctx + ": " + e.what());
  }
}

inline const json& expect_array(const json& doc, const std::filesystem::path& path) {
  require(doc.is_array(), ErrorKind::Malformed, path.string() + ": expected a JSON list");
  return doc;
}

}  // namespace detail

inline std::vector<DiarSegment> parse_diarization(const json& doc, const std::filesystem::path& path) {
  std::vector<DiarSegment> out;
  const auto& arr = detail::expect_array(doc, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto ctx = detail::item_context(path, i);
    const int speaker = detail::int_field(arr[i], "speaker", ctx);
    require(speaker >= 0 && speaker < kMaxSpeakers, ErrorKind::Validation,
            ctx + ": speaker " + std::to_string(speaker) + " outside 0.." +
                std::to_string(kMaxSpeakers - 1));
    out.push_back({speaker, detail::interval_fields(arr[i], ctx)});
  }
  return out;
}

inline std::vector<DiarSegment> read_diarization(const std::filesystem::path& path) {
  return parse_diarization(read_json_file(path), path);
}

inline json diarization_to_json(const std::vector<DiarSegment>& segs) {
  json arr = json::array();
  for (const auto& s : segs) {
    arr.push_back({{"speaker", s.speaker_id}, {"start_s", s.interval.start()}, {"end_s", s.interval.end()}});
  }
  return arr;
}

inline std::vector<TranscriptWord> read_transcript(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  const auto& arr = detail::expect_array(doc, path);
  std::vector<TranscriptWord> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto ctx = detail::item_context(path, i);
    require(arr[i].contains("word") && arr[i]["word"].is_string(), ErrorKind::Malformed,
            ctx + ": missing string field 'word'");
    TranscriptWord w{arr[i]["word"].get<std::string>(), detail::interval_fields(arr[i], ctx),
                     detail::int_field(arr[i], "segment", ctx)};
    if (!out.empty() && out.back().segment_id == w.segment_id) {
      require(w.interval.start() >= out.back().interval.start(), ErrorKind::Validation,
              ctx + ": words within a segment must be time-sorted");
    }
    out.push_back(std::move(w));
  }
  return out;
}

/// Contiguous runs of words sharing a segment id become one segment spanning
/// first-word start to last-word end.
inline std::vector<TextSegment> segments_from_transcript(const std::vector<TranscriptWord>& words) {
  std::vector<TextSegment> out;
  for (const auto& w : words) {
    if (!out.empty() && out.back().segment_id == w.segment_id) {
      const double start = out.back().interval.start();
      out.back().interval = TimeInterval(start, std::max(out.back().interval.end(), w.interval.end()));
    } else {
      out.push_back({w.segment_id, w.interval});
    }
  }
  return out;
}

inline std::vector<TextSegment> read_text_segments(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  const auto& arr = detail::expect_array(doc, path);
  std::vector<TextSegment> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto ctx = detail::item_context(path, i);
    out.push_back({detail::int_field(arr[i], "segment", ctx), detail::interval_fields(arr[i], ctx)});
  }
  return out;
}

inline json text_segments_to_json(const std::vector<TextSegment>& segs) {
  json arr = json::array();
  for (const auto& s : segs) {
    arr.push_back({{"segment", s.segment_id}, {"start_s", s.interval.start()}, {"end_s", s.interval.end()}});
  }
  return arr;
}

inline std::vector<Shot> parse_shots(const json& arr, const std::string& ctx_prefix) {
  require(arr.is_array(), ErrorKind::Malformed, ctx_prefix + ": 'shots' must be a list");
  std::vector<Shot> shots;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto ctx = ctx_prefix + " [shot " + std::to_string(i) + "]";
    shots.push_back({i, detail::interval_fields(arr[i], ctx)});
    if (i > 0) {
      require(shots[i].interval.start() >= shots[i - 1].interval.end() - kTimeEpsilon,
              ErrorKind::Validation, ctx + ": shots must be sorted and non-overlapping");
    }
  }
  return shots;
}

inline json shots_to_json(const std::vector<Shot>& shots) {
  json arr = json::array();
  for (const auto& s : shots) arr.push_back({{"start_s", s.interval.start()}, {"end_s", s.interval.end()}});
  return arr;
}

inline std::vector<Shot> read_shots(const std::filesystem::path& path) {
  return parse_shots(read_json_file(path), path.string());
}

/// CSV `start_seconds,end_seconds,title`. Rows are validated individually;
/// partition checks are left to validate_partition().
inline ChapterList read_chapters_csv(const std::filesystem::path& path, double video_duration) {
  const auto table = csv::read_file(path);
  require(table.header.size() >= 2 && table.header[0] == "start_seconds" &&
              table.header[1] == "end_seconds",
          ErrorKind::Malformed, path.string() + ": expected header start_seconds,end_seconds,title");
  ChapterList list;
  list.video_duration = video_duration;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto ctx = csv::where(path, table.line_numbers[r]);
    require(row.size() >= 2 && row.size() <= 3, ErrorKind::Malformed, ctx + ": expected 2 or 3 fields");
    const double start = csv::parse_double(row[0], ctx);
    const double end = csv::parse_double(row[1], ctx);
    require(start >= 0.0 && end > start, ErrorKind::Validation,
            ctx + ": chapter end " + row[1] + " must exceed start " + row[0]);
    Chapter ch{TimeInterval(start, end), std::nullopt};
    if (row.size() == 3 && !row[2].empty()) ch.title = row[2];
    list.chapters.push_back(std::move(ch));
  }
  return list;
}

inline std::string chapters_to_csv(const ChapterList& list) {
  std::string out = "start_seconds,end_seconds,title\n";
  for (std::size_t i = 0; i < list.chapters.size(); ++i) {
    const auto& c = list.chapters[i];
    out += csv::format_double(c.interval.start()) + "," + csv::format_double(c.interval.end()) + "," +
           csv::quote_field(c.title.value_or("chapter_" + std::to_string(i))) + "\n";
  }
  return out;
}

inline void write_chapters_csv(const std::filesystem::path& path, const ChapterList& list) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out << chapters_to_csv(list);
}

inline std::string partition_report(const std::vector<PartitionViolation>& violations) {
  static constexpr const char* names[] = {"empty", "overlap", "gap", "start-coverage", "end-coverage"};
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(names[static_cast<int>(v.kind)]) + " at chapter " + std::to_string(v.index) +
           " (" + csv::format_double(v.from) + ", " + csv::format_double(v.to) + ")";
  }
  return out;
}

/// read_chapters_csv() plus the partition check; violations are a
/// Validation error naming the file.
inline ChapterList read_partition_csv(const std::filesystem::path& path, double video_duration) {
  auto list = read_chapters_csv(path, video_duration);
  const auto violations = validate_partition(list);
  require(violations.empty(), ErrorKind::Validation, path.string() + ": " + partition_report(violations));
  return list;
}

}  // namespace newsreel::ingest
