// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace newsreel;
using namespace newsreel::fusion;
namespace nt = newsreel::testing;

namespace {

ModelSpec small_bilstm(std::size_t input_dim, std::uint64_t seed = 3) {
  ModelSpec s;
  s.architecture = Architecture::BiLSTM;
  s.input_dim = input_dim;
  s.hidden_dim = 6;
  s.layers = 2;
  s.projection_dim = 4;
  s.seed = seed;
  return s;
}

ModelSpec small_dnn(std::size_t input_dim, std::uint64_t seed = 3) {
  ModelSpec s;
  s.architecture = Architecture::DNN;
  s.input_dim = input_dim;
  s.dnn_dims = {10, 8};
  s.projection_dim = 4;
  s.dropout = 0.0;
  s.seed = seed;
  return s;
}

/// Small normalized synthetic corpus.
std::vector<align::FeatureSequence> small_corpus(std::size_t videos, std::uint64_t seed) {
  nt::TempDir dir("fusion_corpus");
  ingest::SyntheticSpec spec;
  spec.n_videos = videos;
  spec.shots_min = 16;
  spec.shots_max = 24;
  spec.chapters_min = 3;
  spec.chapters_max = 5;
  spec.visual_dim = 8;
  spec.text_dim = 8;
  spec.seed = seed;
  ingest::generate_synthetic(spec, dir.path());
  std::vector<align::FeatureSequence> seqs;
  for (const auto& rec : ingest::load_corpus(dir.path())) seqs.push_back(align::assemble_sequence(rec));
  const auto stats = align::fit_normalizer(seqs);
  for (auto& s : seqs) s = align::normalized(std::move(s), stats);
  return seqs;
}

std::vector<const align::FeatureSequence*> pointers(const std::vector<align::FeatureSequence>& seqs) {
  std::vector<const align::FeatureSequence*> out;
  for (const auto& s : seqs) out.push_back(&s);
  return out;
}

}  // namespace

TEST(Model, DefaultBiLstmParameterCount) {
  const ModelSpec spec;
  EXPECT_EQ(expected_parameter_count(spec), 2830464u);
  EXPECT_EQ(build_model(spec).parameter_count(), 2830464u);
}

TEST(Model, DnnHasOneBlockPerHiddenLayer) {
  ModelSpec spec = small_dnn(12);
  spec.dnn_dims = {9, 8, 7, 6};
  const auto m = build_model(spec);
  EXPECT_EQ(m.parameter_count(), expected_parameter_count(spec));
  EXPECT_EQ(m.buffers.size(), 8u);
  for (std::size_t b = 0; b < 4; ++b) EXPECT_NO_THROW(m.index_of("dnn.b" + std::to_string(b) + ".weight"));
}

TEST(Model, SameSeedSameParameters) {
  const auto a = build_model(small_bilstm(10, 5));
  const auto b = build_model(small_bilstm(10, 5));
  const auto c = build_model(small_bilstm(10, 6));
  ASSERT_EQ(a.params.size(), b.params.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    EXPECT_EQ(a.params[i].value, b.params[i].value);
    differs = differs || a.params[i].value != c.params[i].value;
  }
  EXPECT_TRUE(differs);
}

TEST(Model, OutputShapeFollowsSequenceLength) {
  Rng rng(1);
  Tensor x = Tensor::matrix(7, 10);
  for (auto& v : x.data()) v = rng.normal();
  EXPECT_EQ(forward(build_model(small_bilstm(10)), x).shape(), (std::vector<std::size_t>{7, 4}));
  EXPECT_EQ(forward(build_model(small_dnn(10)), x).shape(), (std::vector<std::size_t>{7, 4}));
  ModelSpec wide;
  wide.input_dim = 10;
  wide.layers = 1;
  wide.hidden_dim = 8;
  EXPECT_EQ(forward(build_model(wide), x).cols(), 128u);
}

TEST(Model, ZeroParametersGiveZeroOutput) {
  auto m = build_model(small_bilstm(5));
  for (auto& p : m.params) p.value = Tensor(p.value.shape(), 0.0);
  Rng rng(2);
  Tensor x = Tensor::matrix(4, 5);
  for (auto& v : x.data()) v = rng.normal();
  const auto y = forward(m, x);
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(Model, BiLstmSeesBothDirections) {
  const auto m = build_model(small_bilstm(5));
  Rng rng(3);
  Tensor x = Tensor::matrix(6, 5);
  for (auto& v : x.data()) v = rng.normal();
  Tensor rev = Tensor::matrix(6, 5);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t d = 0; d < 5; ++d) rev(i, d) = x(5 - i, d);
  const auto a = forward(m, x);
  const auto b = forward(m, rev);
  // Reversing time is not a plain permutation of the outputs: the two LSTM
  // directions have different weights.
  double gap = 0.0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t d = 0; d < 4; ++d) gap = std::max(gap, std::abs(a(i, d) - b(5 - i, d)));
  EXPECT_GT(gap, 1e-6);
  // Changing the last shot changes the first output (backward direction).
  Tensor late = x;
  late(5, 0) += 1.0;
  EXPECT_NE(forward(m, late)(0, 0), a(0, 0));
}

TEST(Model, ValidationRejectsBadSpecs) {
  ModelSpec s;
  s.dropout = 1.0;
  EXPECT_THROW(build_model(s), Error);
  s = ModelSpec{};
  s.architecture = Architecture::DNN;
  s.dnn_dims.clear();
  EXPECT_THROW(build_model(s), Error);
  EXPECT_THROW(architecture_from_string("cnn"), Error);
  Tensor x = Tensor::matrix(3, 4);
  EXPECT_THROW(forward(build_model(small_bilstm(5)), x), Error);
}

TEST(Loss, PerfectDistancesGiveZeroLossAndZeroGradient) {
  const ChapterLabels labels({0, 0, 1, 1, 2});
  const auto target = chaptering::target_matrix(labels);
  Tape t;
  const Var d = t.variable(target.values);
  const Var loss = baf_loss_on_tape(t, d, target, chaptering::adjacency_set(labels));
  EXPECT_EQ(t.value(loss)[0], 0.0);
  t.backward(loss);
  for (double g : t.grad(d).data()) EXPECT_EQ(g, 0.0);
}

TEST(Loss, DuplicatedBatchLeavesLossUnchanged) {
  const auto seqs = small_corpus(2, 4);
  const auto m = build_model(small_bilstm(seqs[0].features.cols()));
  const align::FeatureSequence* one[] = {&seqs[0]};
  const align::FeatureSequence* twice[] = {&seqs[0], &seqs[0]};
  EXPECT_NEAR(batch_loss(m, one, Mode::Eval, nullptr), batch_loss(m, twice, Mode::Eval, nullptr), 1e-12);
}

TEST(Loss, MatchesHostDistanceAndLoss) {
  const auto seqs = small_corpus(1, 5);
  const auto m = build_model(small_bilstm(seqs[0].features.cols()));
  const align::FeatureSequence* one[] = {&seqs[0]};
  const auto d = chaptering::distance_matrix(forward(m, seqs[0].features));
  const auto& labels = *seqs[0].labels;
  EXPECT_NEAR(batch_loss(m, one, Mode::Eval, nullptr),
              chaptering::baf_loss(d, chaptering::target_matrix(labels), labels), 1e-10);
}

TEST(Loss, RejectsUnlabeledSequences) {
  auto seqs = small_corpus(1, 6);
  seqs[0].labels.reset();
  const auto m = build_model(small_bilstm(seqs[0].features.cols()));
  const align::FeatureSequence* one[] = {&seqs[0]};
  EXPECT_THROW(batch_loss(m, one, Mode::Eval, nullptr), Error);
  EXPECT_THROW(batch_loss(m, std::span<const align::FeatureSequence* const>{}, Mode::Eval, nullptr), Error);
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  const auto seqs = small_corpus(2, 7);
  const auto batch = pointers(seqs);
  Rng pick(1);
  for (const auto& spec : {small_bilstm(seqs[0].features.cols()), small_dnn(seqs[0].features.cols())}) {
    const auto check = nt::finite_difference_check(build_model(spec), batch, Mode::Eval, pick, 6);
    EXPECT_LT(check.worst_relative_error, 1e-5) << to_string(spec.architecture) << " " << check.worst_entry;
  }
}

TEST(BatchNorm, EvalModeIsPureAndTrainModeRecordsStatistics) {
  const auto seqs = small_corpus(2, 8);
  const auto m = build_model(small_dnn(seqs[0].features.cols()));
  const auto batch = pointers(seqs);
  const auto a = loss_and_gradients(m, batch, Mode::Eval, nullptr);
  const auto b = loss_and_gradients(m, batch, Mode::Eval, nullptr);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_TRUE(a.batch_norm.empty());
  Rng rng(0);
  const auto train = loss_and_gradients(m, batch, Mode::Train, &rng);
  ASSERT_EQ(train.batch_norm.size(), 2u);
  EXPECT_EQ(train.batch_norm[0].mean.cols(), 10u);
  auto updated = m;
  update_running_stats(updated, train.batch_norm);
  const auto& rm = updated.buffer("dnn.b0.bn_running_mean");
  for (std::size_t k = 0; k < rm.size(); ++k)
    EXPECT_NEAR(rm[k], kBatchNormMomentum * train.batch_norm[0].mean[k], 1e-15);
  EXPECT_NE(forward(updated, seqs[0].features), forward(m, seqs[0].features));
}

TEST(Adam, FirstStepMovesByLearningRateAgainstGradientSign) {
  auto m = build_model(small_bilstm(5));
  const auto before = m;
  std::vector<Tensor> grads;
  Rng rng(9);
  for (const auto& p : m.params) {
    Tensor g(p.value.shape(), 0.0);
    for (auto& v : g.data()) v = rng.normal();
    grads.push_back(g);
  }
  auto state = OptimizerState::for_model(m, AdamHyper{0.01});
  adam_step(m, grads, state);
  // Bias correction makes the first step lr * g / (|g| + eps): the sign of g
  // scaled by lr, up to eps.
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    for (std::size_t k = 0; k < grads[i].size(); ++k) {
      const double g = grads[i][k];
      const double step = before.params[i].value[k] - m.params[i].value[k];
      ASSERT_NEAR(step, 0.01 * g / (std::abs(g) + 1e-8), 1e-15);
      if (std::abs(g) >= 1e-2) {
        ASSERT_NEAR(step, 0.01 * (g > 0 ? 1.0 : -1.0), 0.01 * 1e-6);
      }
    }
  }
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  auto m = build_model(small_dnn(5));
  const auto before = m;
  std::vector<Tensor> grads;
  for (const auto& p : m.params) grads.emplace_back(p.value.shape(), 0.0);
  auto state = OptimizerState::for_model(m);
  for (int k = 0; k < 3; ++k) adam_step(m, grads, state);
  for (std::size_t i = 0; i < m.params.size(); ++i) EXPECT_EQ(m.params[i].value, before.params[i].value);
  grads.pop_back();
  EXPECT_THROW(adam_step(m, grads, state), Error);
}

TEST(CosineLr, Endpoints) {
  EXPECT_DOUBLE_EQ(cosine_lr(0, 100, 0.01), 0.01);
  EXPECT_NEAR(cosine_lr(100, 100, 0.01), 0.0, 1e-18);
  EXPECT_NEAR(cosine_lr(50, 100, 0.01), 0.005, 1e-15);
  EXPECT_THROW(cosine_lr(0, 0, 0.01), Error);
  EXPECT_THROW(cosine_lr(101, 100, 0.01), Error);
  double prev = 1.0;
  for (std::size_t s = 0; s <= 100; ++s) {
    const double lr = cosine_lr(s, 100, 0.01);
    EXPECT_LE(lr, prev);
    prev = lr;
  }
}

class Training : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new std::vector<align::FeatureSequence>(small_corpus(8, 11));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    corpus_ = nullptr;
  }
  std::span<const align::FeatureSequence> train_set() const { return std::span(*corpus_).subspan(0, 6); }
  std::span<const align::FeatureSequence> val_set() const { return std::span(*corpus_).subspan(6); }
  ModelSpec spec() const { return small_bilstm((*corpus_)[0].features.cols()); }

  static std::vector<align::FeatureSequence>* corpus_;
};

std::vector<align::FeatureSequence>* Training::corpus_ = nullptr;

TEST_F(Training, ZeroEpochsReturnsInitialModel) {
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto r = train(spec(), train_set(), val_set(), cfg);
  EXPECT_TRUE(r.history.empty());
  EXPECT_EQ(r.best_epoch, 0u);
  const auto init = build_model(spec());
  for (std::size_t i = 0; i < init.params.size(); ++i) EXPECT_EQ(r.model.params[i].value, init.params[i].value);
  EXPECT_NEAR(r.initial_train_loss, mean_loss(init, train_set()), 1e-12);
}

TEST_F(Training, DeterministicAndReducesLoss) {
  TrainConfig cfg;
  cfg.epochs = 16;
  cfg.base_lr = 1e-2;
  cfg.seed = 4;
  std::vector<EpochRecord> seen;
  const auto a = train(spec(), train_set(), val_set(), cfg, [&](const EpochRecord& r) { seen.push_back(r); });
  const auto b = train(spec(), train_set(), val_set(), cfg);
  ASSERT_EQ(a.history.size(), 16u);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(seen, a.history);
  for (std::size_t i = 0; i < a.model.params.size(); ++i) EXPECT_EQ(a.model.params[i].value, b.model.params[i].value);
  EXPECT_LT(a.history.back().train_loss, 0.5 * a.initial_train_loss);
  // The returned model is the best one on validation.
  double best = a.history[a.best_epoch - 1].val_loss;
  for (const auto& h : a.history) EXPECT_GE(h.val_loss, best);
  EXPECT_NEAR(mean_loss(a.model, val_set()), best, 1e-12);
}

TEST_F(Training, GradientSpotCheckPassesInsideTraining) {
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.grad_check = true;
  EXPECT_NO_THROW(train(spec(), train_set().subspan(0, 2), {}, cfg));
  cfg.batch_size = 0;
  EXPECT_THROW(train(spec(), train_set(), {}, cfg), Error);
  EXPECT_THROW(train(spec(), {}, {}, TrainConfig{}), Error);
}

TEST(Checkpoint, RoundTripPreservesEverything) {
  nt::TempDir dir("ckpt");
  Checkpoint c;
  c.model = build_model(small_dnn(6));
  c.model.buffer("dnn.b1.bn_running_var")[2] = 3.5;
  c.tau = 0.35;
  align::NormalizerStats n;
  n.layout = align::FeatureLayout{2, 1, 2, 1};
  n.mean = {1, 2, 3, 4, 5, 6};
  n.stddev = {1, 1, 2, 2, 3, 3};
  c.normalizer = n;
  write_checkpoint(dir / "m.bin", c);
  const auto back = read_checkpoint(dir / "m.bin");
  EXPECT_EQ(back.model.spec, c.model.spec);
  for (std::size_t i = 0; i < c.model.params.size(); ++i) EXPECT_EQ(back.model.params[i].value, c.model.params[i].value);
  for (std::size_t i = 0; i < c.model.buffers.size(); ++i)
    EXPECT_EQ(back.model.buffers[i].value, c.model.buffers[i].value);
  EXPECT_EQ(back.tau, c.tau);
  ASSERT_TRUE(back.normalizer);
  EXPECT_EQ(back.normalizer->mean, n.mean);
  EXPECT_EQ(back.normalizer->stddev, n.stddev);
  EXPECT_EQ(back.normalizer->layout.total(), 6u);

  Checkpoint bare;
  bare.model = build_model(small_bilstm(4));
  write_checkpoint(dir / "bare.bin", bare);
  const auto bare_back = read_checkpoint(dir / "bare.bin");
  EXPECT_FALSE(bare_back.tau);
  EXPECT_FALSE(bare_back.normalizer);
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  nt::TempDir dir("ckpt_bad");
  const auto kind_of = [](const std::filesystem::path& p) {
    try {
      read_checkpoint(p);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;  // sentinel: no error
  };
  EXPECT_EQ(kind_of(dir / "missing.bin"), ErrorKind::MissingFile);
  Checkpoint c;
  c.model = build_model(small_bilstm(4));
  write_checkpoint(dir / "ok.bin", c);
  auto bytes = nt::read_bytes(dir / "ok.bin");
  {
    auto bad = bytes;
    bad[0] = 'X';
    std::ofstream(dir / "magic.bin", std::ios::binary) << bad;
    EXPECT_EQ(kind_of(dir / "magic.bin"), ErrorKind::BadMagic);
  }
  {
    std::ofstream(dir / "short.bin", std::ios::binary) << bytes.substr(0, bytes.size() - 9);
    EXPECT_EQ(kind_of(dir / "short.bin"), ErrorKind::Truncated);
  }
  {
    std::ofstream(dir / "long.bin", std::ios::binary) << bytes << "xx";
    EXPECT_EQ(kind_of(dir / "long.bin"), ErrorKind::Malformed);
  }
}
