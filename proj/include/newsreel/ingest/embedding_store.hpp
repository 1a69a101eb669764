// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "newsreel/error.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::ingest {

static_assert(std::endian::native == std::endian::little,
              "embedding store I/O assumes a little-endian host");

/**
 * @brief Row-major float32 matrix stored on disk as
 *
 *     "EMBS" | u32 version (=1) | u32 count | u32 dim | count*dim float32
 *
 * all little-endian, no padding.
 */
struct EmbeddingStore {
  static constexpr char kMagic[4] = {'E', 'M', 'B', 'S'};
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kHeaderBytes = 16;

  std::uint32_t count = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t i) const {
    require(i < count, ErrorKind::InvalidArgument,
            "row " + std::to_string(i) + " out of range for store with " + std::to_string(count) +
                " rows");
    return {values.data() + i * dim, dim};
  }

  std::vector<double> row_as_double(std::size_t i) const {
    const auto r = row(i);
    return {r.begin(), r.end()};
  }

  static EmbeddingStore from_tensor(const Tensor& t) {
    EmbeddingStore s;
    s.count = static_cast<std::uint32_t>(t.rows());
    s.dim = static_cast<std::uint32_t>(t.cols());
    s.values.assign(t.data().begin(), t.data().end());
    return s;
  }

  Tensor to_tensor() const {
    return Tensor({count, dim}, std::vector<double>(values.begin(), values.end()));
  }
};

inline void write_embedding_store(const std::filesystem::path& path, const EmbeddingStore& store) {
  require(store.values.size() == static_cast<std::size_t>(store.count) * store.dim,
          ErrorKind::CountMismatch, "store payload does not match count x dim");
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out.write(EmbeddingStore::kMagic, 4);
  const std::uint32_t header[3] = {EmbeddingStore::kVersion, store.count, store.dim};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(store.values.data()),
            static_cast<std::streamsize>(store.values.size() * sizeof(float)));
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

inline EmbeddingStore read_embedding_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  require(static_cast<bool>(in), ErrorKind::MissingFile, "cannot open " + path.string());
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0);
  require(file_size >= EmbeddingStore::kHeaderBytes, ErrorKind::Truncated,
          path.string() + ": header needs 16 bytes, file has " + std::to_string(file_size));
  char header[EmbeddingStore::kHeaderBytes];
  in.read(header, sizeof(header));
  require(std::memcmp(header, EmbeddingStore::kMagic, 4) == 0, ErrorKind::BadMagic,
          path.string() + ": expected magic EMBS, got '" + std::string(header, 4) + "'");
  std::uint32_t fields[3];
  std::memcpy(fields, header + 4, sizeof(fields));
  require(fields[0] == EmbeddingStore::kVersion, ErrorKind::UnsupportedVersion,
          path.string() + ": version " + std::to_string(fields[0]));
  EmbeddingStore store;
  store.count = fields[1];
  store.dim = fields[2];
  const std::uint64_t expected = static_cast<std::uint64_t>(store.count) * store.dim * 4;
  const std::uint64_t payload = file_size - EmbeddingStore::kHeaderBytes;
  require(payload >= expected, ErrorKind::Truncated,
          path.string() + ": header declares " + std::to_string(store.count) + " rows x " +
              std::to_string(store.dim) + " dims (" + std::to_string(expected) +
              " bytes), payload holds " + std::to_string(payload));
  require(payload == expected, ErrorKind::CountMismatch,
          path.string() + ": " + std::to_string(payload - expected) + " trailing bytes after payload");
  store.values.resize(static_cast<std::size_t>(store.count) * store.dim);
  in.read(reinterpret_cast<char*>(store.values.data()), static_cast<std::streamsize>(expected));
  require(static_cast<bool>(in), ErrorKind::Io, path.string() + ": read failed");
  for (std::size_t i = 0; i < store.values.size(); ++i) {
    require(std::isfinite(store.values[i]), ErrorKind::Malformed,
            path.string() + ": non-finite value at row " + std::to_string(i / store.dim));
  }
  return store;
}

}  // namespace newsreel::ingest
