// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace newsreel;
using namespace newsreel::chaptering;
namespace nt = newsreel::testing;

namespace {

std::vector<Shot> unit_shots(std::size_t n) {
  std::vector<Shot> shots;
  for (std::size_t i = 0; i < n; ++i)
    shots.push_back({i, TimeInterval(static_cast<double>(i), static_cast<double>(i + 1))});
  return shots;
}

/// Distances with the given consecutive entries; other pairs 0.5.
DistanceMatrix chain(const std::vector<double>& consecutive) {
  const std::size_t n = consecutive.size() + 1;
  DistanceMatrix d{Tensor({n, n}, 0.5)};
  for (std::size_t i = 0; i < n; ++i) d.values(i, i) = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) d.values(i, i + 1) = d.values(i + 1, i) = consecutive[i];
  return d;
}

Tensor rows(std::initializer_list<std::vector<double>> r) {
  Tensor t = Tensor::matrix(r.size(), r.begin()->size());
  std::size_t i = 0;
  for (const auto& row : r) {
    for (std::size_t d = 0; d < row.size(); ++d) t(i, d) = row[d];
    ++i;
  }
  return t;
}

}  // namespace

TEST(DistanceMatrix, Examples) {
  const auto d = distance_matrix(rows({{1, 0}, {1, 0}, {-1, 0}, {0, 2}, {0, 0}}));
  EXPECT_DOUBLE_EQ(d(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(d(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(d(0, 3), 0.5);
  EXPECT_DOUBLE_EQ(d(4, 0), 0.5);
  EXPECT_DOUBLE_EQ(d(4, 4), 0.0);
}

TEST(DistanceMatrix, SymmetricBoundedZeroDiagonal) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor f = Tensor::matrix(2 + rng.uniform_int(0, 10), 1 + rng.uniform_int(0, 6));
    for (auto& v : f.data()) v = rng.normal();
    for (const auto kind : {DistanceKind::Cosine, DistanceKind::Euclidean}) {
      const auto d = distance_matrix(f, kind);
      for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_EQ(d(i, i), 0.0);
        for (std::size_t j = 0; j < d.size(); ++j) {
          EXPECT_EQ(d(i, j), d(j, i));
          EXPECT_GE(d(i, j), 0.0);
          EXPECT_LE(d(i, j), 1.0);
        }
      }
    }
  }
  EXPECT_THROW(distance_matrix(Tensor::matrix(0, 3)), Error);
  Tensor bad = Tensor::matrix(2, 2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(distance_matrix(bad), Error);
}

TEST(DistanceMatrix, CosineIgnoresRowScale) {
  Rng rng(4);
  Tensor f = Tensor::matrix(6, 5);
  for (auto& v : f.data()) v = rng.normal();
  Tensor g = f;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t d = 0; d < 5; ++d) g(i, d) *= 0.5 + static_cast<double>(i);
  const auto a = distance_matrix(f), b = distance_matrix(g);
  for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-12);
}

TEST(TargetMatrix, BinaryByChapterEquality) {
  const auto t = target_matrix(ChapterLabels({0, 0, 1, 2}));
  EXPECT_EQ(t(0, 1), 0.0);
  EXPECT_EQ(t(0, 2), 1.0);
  EXPECT_EQ(t(0, 3), 1.0);
  EXPECT_EQ(t(3, 3), 0.0);
}

TEST(AdjacencySet, Examples) {
  EXPECT_EQ(adjacency_set(ChapterLabels({0, 1, 2})).size(), 7u);
  EXPECT_EQ(adjacency_set(ChapterLabels({0, 0})).size(), 4u);
  EXPECT_EQ(adjacency_set(ChapterLabels({0, 0, 1, 1})).size(), 16u);
  const auto a = adjacency_set(ChapterLabels({0, 1, 2}));
  EXPECT_FALSE(a.contains(0, 2));
  EXPECT_TRUE(a.contains(2, 1));
  EXPECT_FALSE(a.contains(3, 0));
}

TEST(AdjacencySet, MatchesBruteForce) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto labels = nt::random_labels(rng, 1 + rng.uniform_int(0, 49), rng.uniform(0.05, 0.6));
    const auto pairs = adjacency_set(ChapterLabels(labels)).pairs();
    const std::set<std::pair<std::size_t, std::size_t>> got(pairs.begin(), pairs.end());
    ASSERT_EQ(got.size(), pairs.size());
    ASSERT_EQ(got, nt::brute_adjacency(labels));
  }
}

TEST(BafLoss, WorkedExamples) {
  const ChapterLabels labels({0, 0, 1, 1});
  const auto target = target_matrix(labels);
  EXPECT_NEAR(baf_loss(DistanceMatrix{Tensor({4, 4}, 0.5)}, target, labels), 2.0, 1e-12);
  DistanceMatrix d{target.values};
  d.values(0, 3) += 0.8;
  d.values(3, 0) += 0.8;
  EXPECT_NEAR(baf_loss(d, target, labels), 0.8 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(baf_loss(DistanceMatrix{target.values}, target, labels), 0.0);
}

TEST(BafLoss, EqualsDenseMaskedOracleAndIgnoresNonAdjacentPairs) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto raw = nt::random_labels(rng, 2 + rng.uniform_int(0, 30), 0.3);
    const ChapterLabels labels(raw);
    const std::size_t n = raw.size();
    DistanceMatrix d{Tensor::matrix(n, n)};
    for (auto& v : d.values.data()) v = rng.uniform();
    const auto target = target_matrix(labels);
    const double loss = baf_loss(d, target, labels);
    EXPECT_NEAR(loss, nt::dense_masked_loss(d.values, raw), 1e-12);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(raw[i] - raw[j]) > 1) d.values(i, j) = rng.uniform();
    EXPECT_EQ(baf_loss(d, target, labels), loss);
  }
  EXPECT_THROW(baf_loss(DistanceMatrix{Tensor::matrix(3, 3)}, target_matrix(ChapterLabels({0, 1})),
                        ChapterLabels({0, 1})),
               Error);
}

TEST(SegmentByThreshold, Examples) {
  const auto shots = unit_shots(4);
  const auto out = segment_by_threshold(chain({0.1, 0.9, 0.2}), 0.5, shots, 4.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out.chapters[1].interval.start(), 2.0);
  EXPECT_EQ(segment_by_threshold(chain({0.1, 0.2, 0.3}), 0.5, shots, 4.0).size(), 1u);
  EXPECT_EQ(segment_by_threshold(chain({0.6, 0.7, 0.8}), 0.5, shots, 4.0).size(), 4u);
  EXPECT_THROW(segment_by_threshold(chain({0.1}), 0.5, shots, 4.0), Error);
}

TEST(SegmentByThreshold, CountFormulaMonotoneInTauAndValidPartition) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 40);
    std::vector<double> consecutive(n - 1);
    for (auto& v : consecutive) v = rng.uniform();
    const auto d = chain(consecutive);
    const auto shots = unit_shots(n);
    std::size_t prev = n + 1;
    for (double tau : default_threshold_grid()) {
      const auto out = segment_by_threshold(d, tau, shots, static_cast<double>(n));
      const auto above = std::count_if(consecutive.begin(), consecutive.end(), [&](double v) { return v > tau; });
      ASSERT_EQ(out.size(), 1u + static_cast<std::size_t>(above));
      ASSERT_LE(out.size(), prev);
      ASSERT_TRUE(validate_partition(out).empty());
      prev = out.size();
    }
  }
}

TEST(SweepThreshold, SeparableCasePicksSmallestTauInBand) {
  const auto shots = unit_shots(6);
  std::vector<SweepItem> items;
  items.push_back({chain({0.1, 0.1, 0.9, 0.1, 0.9}), shots, 6.0, nt::chapters_at({3, 5}, 6.0)});
  items.push_back({chain({0.9, 0.1, 0.1, 0.1, 0.1}), shots, 6.0, nt::chapters_at({1}, 6.0)});
  EXPECT_NEAR(sweep_threshold(items, default_threshold_grid()), 0.10, 1e-12);
}

TEST(SweepThreshold, SingleChapterVideosPickGridMax) {
  Rng rng(8);
  const auto shots = unit_shots(8);
  std::vector<SweepItem> items;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> c(7);
    for (auto& v : c) v = rng.uniform(0.0, 0.9);
    c[3] = 0.93;  // only the top grid value avoids every false boundary
    items.push_back({chain(c), shots, 8.0, nt::chapters_at({}, 8.0)});
  }
  EXPECT_NEAR(sweep_threshold(items, default_threshold_grid()), 0.95, 1e-12);
  const double one[] = {0.3};
  EXPECT_EQ(sweep_threshold(items, one), 0.3);
  EXPECT_THROW(sweep_threshold(std::span<const SweepItem>{}, default_threshold_grid()), Error);
  EXPECT_THROW(sweep_threshold(items, std::span<const double>{}), Error);
}

TEST(KMeans, PicksLargerClusterAsAnchor) {
  Tensor pts = Tensor::matrix(8, 2);
  Rng rng(9);
  const std::size_t big[] = {0, 2, 3, 5, 7};
  for (std::size_t i = 0; i < 8; ++i) {
    const bool in_big = std::find(std::begin(big), std::end(big), i) != std::end(big);
    pts(i, 0) = (in_big ? 10.0 : -10.0) + rng.normal(0.0, 0.1);
    pts(i, 1) = rng.normal(0.0, 0.1);
  }
  const auto r = kmeans(pts, 2, 1);
  auto sizes = r.sizes;
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 5}));
  const auto anchor = anchor_shots(pts, nullptr, 2, 1);
  for (std::size_t i = 0; i < 8; ++i)
    EXPECT_EQ(anchor[i], std::find(std::begin(big), std::end(big), i) != std::end(big)) << i;
  // Shots 0, 2-3, 5, 7 open chapters.
  const auto list = anchor_segment(pts, unit_shots(8), 8.0, nullptr, 2, 1);
  ASSERT_EQ(list.size(), 4u);
  EXPECT_DOUBLE_EQ(list.chapters[1].interval.start(), 2.0);
  EXPECT_DOUBLE_EQ(list.chapters[2].interval.start(), 5.0);
  EXPECT_DOUBLE_EQ(list.chapters[3].interval.start(), 7.0);
}

TEST(KMeans, SingleClusterGivesSingleChapterAndErrors) {
  Rng rng(10);
  Tensor pts = Tensor::matrix(6, 3);
  for (auto& v : pts.data()) v = rng.normal();
  EXPECT_EQ(anchor_segment(pts, unit_shots(6), 6.0, nullptr, 1).size(), 1u);
  EXPECT_THROW(kmeans(pts, 0, 0), Error);
  EXPECT_THROW(kmeans(pts, 7, 0), Error);
  const std::vector<bool> flags(5, true);
  EXPECT_THROW(anchor_segment(pts, unit_shots(6), 6.0, &flags, 2), Error);
  const auto a = kmeans(pts, 3, 4), b = kmeans(pts, 3, 4);
  EXPECT_EQ(a.assignment, b.assignment);
}

class PlantedCorpus : public ::testing::Test {
 protected:
  static ingest::SyntheticSpec planted(std::uint64_t seed, std::size_t n) {
    ingest::SyntheticSpec spec;
    spec.n_videos = n;
    spec.separation = 4.0;
    spec.noise = 0.3;
    spec.informative_fraction = 1.0;
    spec.seed = seed;
    return spec;
  }
  static std::vector<ingest::VideoRecord> make(const ingest::SyntheticSpec& spec) {
    nt::TempDir dir("planted");
    ingest::generate_synthetic(spec, dir.path());
    return ingest::load_corpus(dir.path());
  }
};

TEST_F(PlantedCorpus, AnchorBaselineRecoversChapterStarts) {
  // The anchor has its own visual mean and always a face flag; reporters are
  // rarely flagged and come from two alternating topics, so the face-flagged
  // shots form three clusters with the anchor as the largest.
  auto spec = planted(31, 12);
  spec.topics = 2;
  spec.chapter_jitter = 0.0;
  spec.face_prob = 0.12;
  for (const auto& rec : make(spec)) {
    const auto pred = chaptering::anchor_segment(rec, 3, 0);
    ASSERT_EQ(pred.size(), rec.chapters->size()) << rec.id;
    for (std::size_t c = 0; c < pred.size(); ++c)
      EXPECT_DOUBLE_EQ(pred.chapters[c].interval.start(), rec.chapters->chapters[c].interval.start()) << rec.id;
  }
}

TEST_F(PlantedCorpus, ZeroShotRecoversBoundaryCount) {
  auto spec = planted(32, 8);
  spec.anchor_pattern = false;
  const auto records = make(spec);
  std::vector<align::FeatureSequence> seqs;
  for (const auto& r : records) seqs.push_back(align::assemble_sequence(r));
  const auto stats = align::fit_normalizer(std::span(seqs).subspan(0, 4));
  for (auto& s : seqs) s = align::normalized(std::move(s), stats);
  const auto items = raw_sweep_items(std::span(seqs).subspan(0, 4));
  const double tau = sweep_threshold(items, default_threshold_grid());
  for (std::size_t v = 4; v < seqs.size(); ++v) {
    const auto pred = zero_shot_segment(seqs[v], tau);
    const auto truth = static_cast<long>(seqs[v].chapters->size());
    EXPECT_LE(std::abs(static_cast<long>(pred.size()) - truth), 1) << seqs[v].video_id << " tau " << tau;
  }
  EXPECT_EQ(zero_shot_segment(seqs[4], 0.999).size(), 1u);
  EXPECT_EQ(zero_shot_segment(seqs[4], 1e-9).size(), seqs[4].length());
}

TEST_F(PlantedCorpus, ZeroShotIsNearChanceWithoutSeparation) {
  // Anchor pattern off so the speaker track carries no boundary signal either.
  const auto zero_shot_vs_chance = [](double separation, std::uint64_t seed) {
    ingest::SyntheticSpec spec;
    spec.n_videos = 20;
    spec.separation = separation;
    spec.noise = 1.0;
    spec.anchor_pattern = false;
    spec.seed = seed;
    std::vector<align::FeatureSequence> seqs;
    for (const auto& r : make(spec)) seqs.push_back(align::assemble_sequence(r));
    const auto fit = std::span(seqs).subspan(0, 10);
    const auto stats = align::fit_normalizer(fit);
    for (auto& s : seqs) s = align::normalized(std::move(s), stats);
    const double tau = sweep_threshold(raw_sweep_items(fit), default_threshold_grid());
    std::vector<eval::MetricReport> reports;
    for (const auto& s : std::span(seqs).subspan(10)) reports.push_back(eval::evaluate(zero_shot_segment(s, tau), *s.chapters));
    const double chance = nt::chance_f1_iou50(std::span(seqs).subspan(10), nt::boundary_rate(fit), 7);
    return std::pair{eval::aggregate(reports).iou(0).f1, chance};
  };
  for (std::uint64_t seed = 40; seed < 45; ++seed) {
    const auto [degenerate, chance] = zero_shot_vs_chance(0.0, seed);
    EXPECT_NEAR(degenerate, chance, 0.1) << "seed " << seed;
    const auto [separated, chance_again] = zero_shot_vs_chance(4.0, seed);
    EXPECT_GT(separated, chance_again + 0.5) << "seed " << seed;
  }
}
