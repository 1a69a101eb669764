// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "newsreel/error.hpp"
#include "newsreel/random.hpp"

namespace newsreel::ingest {

using SplitRatios = std::array<double, 3>;

/// Largest-remainder apportionment of n items; ties go to the earlier split.
inline std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
  double total = 0.0;
  for (double r : ratios) {
    require(r > 0.0 && std::isfinite(r), ErrorKind::InvalidArgument, "split ratios must be positive");
    total += r;
  }
  require(std::abs(total - 1.0) < 1e-9, ErrorKind::InvalidArgument, "split ratios must sum to 1");
  require(n >= ratios.size(), ErrorKind::InvalidArgument,
          "need at least " + std::to_string(ratios.size()) + " records to split, got " +
              std::to_string(n));
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double quota = static_cast<double>(n) * ratios[i];
    sizes[i] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    remainder[i] = quota - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

template <typename T>
struct DatasetSplit {
  std::vector<T> train;
  std::vector<T> val;
  std::vector<T> test;
};

/// Seeded shuffle of whole records, then contiguous slices sized by
/// split_sizes().
template <typename T>
DatasetSplit<T> split_dataset(std::vector<T> records, const SplitRatios& ratios, std::uint64_t seed) {
  const auto sizes = split_sizes(records.size(), ratios);
  Rng rng(seed);
  rng.shuffle(records);
  DatasetSplit<T> out;
  auto it = records.begin();
  out.train.assign(it, it + static_cast<std::ptrdiff_t>(sizes[0]));
  it += static_cast<std::ptrdiff_t>(sizes[0]);
  out.val.assign(it, it + static_cast<std::ptrdiff_t>(sizes[1]));
  it += static_cast<std::ptrdiff_t>(sizes[1]);
  out.test.assign(it, records.end());
  return out;
}

}  // namespace newsreel::ingest
