// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "newsreel/core/timeline.hpp"
#include "newsreel/error.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::chaptering {

/// Symmetric n x n matrix with zero diagonal and entries in [0, 1].
struct DistanceMatrix {
  Tensor values;

  std::size_t size() const { return values.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

/// Binary ground truth: 0 inside a chapter, 1 across chapters.
struct TargetMatrix {
  Tensor values;

  std::size_t size() const { return values.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

enum class DistanceKind { Cosine, Euclidean };

namespace detail {

inline DistanceMatrix cosine_distance(const Tensor& f) {
  const std::size_t n = f.rows();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : f.row_span(i)) s += v * v;
    norms[i] = std::sqrt(s);
  }
  DistanceMatrix d{Tensor::matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double value = 0.5;
      if (norms[i] > 0.0 && norms[j] > 0.0) {
        double dot = 0.0;
        const auto a = f.row_span(i);
        const auto b = f.row_span(j);
        for (std::size_t k = 0; k < a.size(); ++k) dot += (a[k] / norms[i]) * (b[k] / norms[j]);
        value = std::clamp((1.0 - dot) / 2.0, 0.0, 1.0);
      }
      d.values(i, j) = value;
      d.values(j, i) = value;
    }
  }
  return d;
}

inline DistanceMatrix euclidean_distance(const Tensor& f) {
  const std::size_t n = f.rows();
  DistanceMatrix d{Tensor::matrix(n, n)};
  double max_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      const auto a = f.row_span(i);
      const auto b = f.row_span(j);
      for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      d.values(i, j) = d.values(j, i) = std::sqrt(s);
      max_d = std::max(max_d, d.values(i, j));
    }
  }
  // The diagonal pins the minimum at 0, so min-max squashing is a division.
  if (max_d > 0.0)
    for (auto& v : d.values.data()) v /= max_d;
  return d;
}

}  // namespace detail

/**
 * @brief Pairwise shot distances, D_ij = (1 - cos(f_i, f_j)) / 2 by default.
 *
 * A zero-norm row sits at distance 0.5 from every other row.
 */
inline DistanceMatrix distance_matrix(const Tensor& features, DistanceKind kind = DistanceKind::Cosine) {
  require(features.rows() >= 1, ErrorKind::InvalidArgument, "distance matrix needs at least one row");
  require(features.all_finite(), ErrorKind::InvalidArgument, "features contain non-finite values");
  return kind == DistanceKind::Cosine ? detail::cosine_distance(features)
                                      : detail::euclidean_distance(features);
}

inline TargetMatrix target_matrix(const ChapterLabels& labels) {
  const std::size_t n = labels.size();
  TargetMatrix t{Tensor::matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t.values(i, j) = labels[i] == labels[j] ? 0.0 : 1.0;
  return t;
}

/**
 * @brief Ordered shot pairs whose chapters are equal or adjacent.
 *
 * Includes the diagonal; (i, j) and (j, i) are distinct members.
 */
class AdjacencySet {
 public:
  explicit AdjacencySet(const ChapterLabels& labels) : n_(labels.size()), mask_(n_ * n_, 0) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (std::abs(labels[i] - labels[j]) <= 1) mask_[i * n_ + j] = 1;
  }

  std::size_t dimension() const { return n_; }
  bool contains(std::size_t i, std::size_t j) const { return i < n_ && j < n_ && mask_[i * n_ + j]; }

  std::size_t size() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), char{1}));
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (mask_[i * n_ + j]) out.emplace_back(i, j);
    return out;
  }

  /// 0/1 matrix form, used as a constant mask inside the training graph.
  Tensor mask() const {
    Tensor m = Tensor::matrix(n_, n_);
    for (std::size_t k = 0; k < mask_.size(); ++k) m[k] = mask_[k];
    return m;
  }

 private:
  std::size_t n_;
  std::vector<char> mask_;
};

inline AdjacencySet adjacency_set(const ChapterLabels& labels) { return AdjacencySet(labels); }

/// Block adjacent Frobenius loss: the Frobenius norm of D - D* restricted to
/// the adjacency set of `labels`.
inline double baf_loss(const DistanceMatrix& d, const TargetMatrix& target, const ChapterLabels& labels) {
  const std::size_t n = d.size();
  require(d.values.rows() == n && d.values.cols() == n && target.values.rows() == n &&
              target.values.cols() == n && labels.size() == n,
          ErrorKind::DimensionMismatch, "baf_loss operands disagree in size");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(labels[i] - labels[j]) > 1) continue;
      const double diff = d(i, j) - target(i, j);
      sum += diff * diff;
    }
  }
  return std::sqrt(sum);
}

}  // namespace newsreel::chaptering
