// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "newsreel/align/align.hpp"
#include "newsreel/error.hpp"
#include "newsreel/fusion/model.hpp"

namespace newsreel::fusion {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

/**
 * @brief Trained model bundle as written by `train`.
 *
 * Layout (little-endian):
 *
 *     "MDL1" | u32 meta_len | meta JSON (UTF-8)
 *     3 sections (params, buffers, extras), each:
 *       u32 count | count x ( u32 name_len | name | u32 rank | rank x u32 dim | float64 data )
 *
 * The meta JSON carries {"spec", "tau", "layout"}; extras hold the
 * normalizer as "normalizer.mean" / "normalizer.std".
 */
struct Checkpoint {
  ModelParameters model;
  std::optional<align::NormalizerStats> normalizer;
  std::optional<double> tau;
};

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

inline void put_tensor(std::ostream& out, const std::string& name, const Tensor& t) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
  out.write(reinterpret_cast<const char*>(t.data().data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
}

class Reader {
 public:
  Reader(std::vector<char> bytes, std::string origin) : bytes_(std::move(bytes)), origin_(std::move(origin)) {}

  void take(void* dst, std::size_t n) {
    require(pos_ + n <= bytes_.size(), ErrorKind::Truncated, origin_ + ": unexpected end of checkpoint");
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::uint32_t u32() {
    std::uint32_t v;
    take(&v, 4);
    return v;
  }

  std::string str(std::size_t n) {
    std::string s(n, '\0');
    take(s.data(), n);
    return s;
  }

  NamedTensor tensor() {
    NamedTensor nt;
    nt.name = str(u32());
    std::vector<std::size_t> shape(u32());
    for (auto& d : shape) d = u32();
    std::vector<double> data(Tensor::element_count(shape));
    take(data.data(), data.size() * sizeof(double));
    nt.value = Tensor(std::move(shape), std::move(data));
    return nt;
  }

  std::vector<NamedTensor> section() {
    std::vector<NamedTensor> out(u32());
    for (auto& t : out) t = tensor();
    return out;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::vector<char> bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

inline nlohmann::json layout_to_json(const align::FeatureLayout& l) {
  return {{"visual", l.visual}, {"text", l.text}, {"speaker", l.speaker}, {"audio", l.audio}};
}

inline align::FeatureLayout layout_from_json(const nlohmann::json& j) {
  return {j.at("visual").get<std::size_t>(), j.at("text").get<std::size_t>(), j.at("speaker").get<std::size_t>(),
          j.at("audio").get<std::size_t>()};
}

}  // namespace detail

inline void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json meta;
  meta["spec"] = spec_to_json(ckpt.model.spec);
  meta["tau"] = ckpt.tau ? nlohmann::json(*ckpt.tau) : nlohmann::json(nullptr);
  meta["layout"] = ckpt.normalizer ? detail::layout_to_json(ckpt.normalizer->layout) : nlohmann::json(nullptr);
  const std::string meta_text = meta.dump();

  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out.write("MDL1", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(meta_text.size()));
  out.write(meta_text.data(), static_cast<std::streamsize>(meta_text.size()));
  for (const auto* section : {&ckpt.model.params, &ckpt.model.buffers}) {
    detail::put_u32(out, static_cast<std::uint32_t>(section->size()));
    for (const auto& t : *section) detail::put_tensor(out, t.name, t.value);
  }
  if (ckpt.normalizer) {
    const auto& n = *ckpt.normalizer;
    detail::put_u32(out, 2);
    detail::put_tensor(out, "normalizer.mean", Tensor::row(n.mean));
    detail::put_tensor(out, "normalizer.std", Tensor::row(n.stddev));
  } else {
    detail::put_u32(out, 0);
  }
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::MissingFile, "cannot open " + path.string());
  detail::Reader r({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}, path.string());
  char magic[4];
  r.take(magic, 4);
  require(std::memcmp(magic, "MDL1", 4) == 0, ErrorKind::BadMagic, path.string() + ": expected magic MDL1");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(r.str(r.u32()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Malformed, path.string() + ": " + e.what());
  }
  Checkpoint ckpt;
  ckpt.model = build_model(spec_from_json(meta.at("spec")));
  auto params = r.section();
  auto buffers = r.section();
  auto extras = r.section();
  require(r.at_end(), ErrorKind::Malformed, path.string() + ": trailing bytes after checkpoint");
  require(params.size() == ckpt.model.params.size() && buffers.size() == ckpt.model.buffers.size(),
          ErrorKind::CountMismatch, path.string() + ": tensor count does not match the model spec");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i].name == ckpt.model.params[i].name && params[i].value.same_shape(ckpt.model.params[i].value),
            ErrorKind::DimensionMismatch, path.string() + ": unexpected tensor " + params[i].name);
  }
  for (std::size_t i = 0; i < buffers.size(); ++i) {
    require(buffers[i].name == ckpt.model.buffers[i].name, ErrorKind::DimensionMismatch,
            path.string() + ": unexpected buffer " + buffers[i].name);
  }
  ckpt.model.params = std::move(params);
  ckpt.model.buffers = std::move(buffers);
  if (!meta["tau"].is_null()) ckpt.tau = meta["tau"].get<double>();
  if (extras.size() == 2) {
    align::NormalizerStats n;
    n.mean = extras[0].value.data();
    n.stddev = extras[1].value.data();
    n.layout = detail::layout_from_json(meta.at("layout"));
    ckpt.normalizer = std::move(n);
  }
  return ckpt;
}

}  // namespace newsreel::fusion
