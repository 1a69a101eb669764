// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "newsreel/align/align.hpp"
#include "newsreel/chaptering/distance.hpp"
#include "newsreel/chaptering/segment.hpp"
#include "newsreel/error.hpp"
#include "newsreel/eval/metrics.hpp"
#include "newsreel/fusion/loss.hpp"
#include "newsreel/fusion/model.hpp"
#include "newsreel/fusion/optimizer.hpp"
#include "newsreel/random.hpp"

namespace newsreel::fusion {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 1;
  double base_lr = 5e-3;
  std::uint64_t seed = 0;
  /// Threshold used only for the per-epoch validation F1 in the history.
  double history_tau = 0.5;
  /// Global gradient-norm clip; 0 disables.
  double grad_clip = 0.0;
  /// Finite-difference check of a few gradient entries on the first batch.
  bool grad_check = false;

  void validate() const {
    require(batch_size >= 1, ErrorKind::InvalidArgument, "batch_size must be >= 1");
    require(base_lr > 0.0, ErrorKind::InvalidArgument, "base_lr must be positive");
    require(history_tau > 0.0 && history_tau < 1.0, ErrorKind::InvalidArgument, "history_tau must lie in (0, 1)");
    require(grad_clip >= 0.0, ErrorKind::InvalidArgument, "grad_clip must be >= 0");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // eval-mode mean over the training set after the epoch
  double val_loss = 0.0;
  double val_f1_iou50 = 0.0;
  double learning_rate = 0.0;  // at the last step of the epoch

  bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
  ModelParameters model;  // best validation loss
  std::vector<EpochRecord> history;
  double initial_train_loss = 0.0;
  std::size_t best_epoch = 0;  // 0 means the initial parameters
};

/// Eval-mode mean loss over a set of sequences.
inline double mean_loss(const ModelParameters& model, std::span<const align::FeatureSequence> set) {
  if (set.empty()) return 0.0;
  double total = 0.0;
  for (const auto& seq : set) {
    const align::FeatureSequence* one[] = {&seq};
    total += batch_loss(model, one, Mode::Eval, nullptr);
  }
  return total / static_cast<double>(set.size());
}

/// Micro-averaged F1@IoU0.5 of eval-mode predictions at a fixed threshold.
inline double f1_iou50(const ModelParameters& model, std::span<const align::FeatureSequence> set, double tau) {
  std::vector<eval::MetricReport> reports;
  for (const auto& seq : set) {
    if (!seq.chapters) continue;
    const auto d = chaptering::distance_matrix(forward(model, seq.features));
    reports.push_back(eval::evaluate(chaptering::segment_by_threshold(d, tau, seq.shots, seq.duration), *seq.chapters));
  }
  if (reports.empty()) return 0.0;
  return eval::aggregate(reports).iou(0).f1;
}

inline double gradient_norm(std::span<const Tensor> grads) {
  double s = 0.0;
  for (const auto& g : grads)
    for (double v : g.data()) s += v * v;
  return std::sqrt(s);
}

/// Central-difference check of a handful of parameter entries; returns the
/// worst relative error |a - n| / max(|a|, |n|, 1e-4).
inline double spot_check_gradients(const ModelParameters& model, std::span<const align::FeatureSequence* const> batch,
                                   std::uint64_t seed, std::size_t probes = 8, double h = 1e-5) {
  const auto analytic = loss_and_gradients(model, batch, Mode::Eval, nullptr);
  Rng rng(seed);
  double worst = 0.0;
  ModelParameters probe = model;
  for (std::size_t k = 0; k < probes; ++k) {
    const auto p = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(model.params.size()) - 1));
    const auto i = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(model.params[p].value.size()) - 1));
    const double orig = probe.params[p].value[i];
    probe.params[p].value[i] = orig + h;
    const double up = batch_loss(probe, batch, Mode::Eval, nullptr);
    probe.params[p].value[i] = orig - h;
    const double down = batch_loss(probe, batch, Mode::Eval, nullptr);
    probe.params[p].value[i] = orig;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic.gradients[p][i];
    worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-4}));
  }
  return worst;
}

using EpochCallback = std::function<void(const EpochRecord&)>;

/**
 * @brief Adam + cosine schedule over shuffled mini-batches.
 *
 * The learning rate follows cosine_lr over epochs * ceil(n / batch_size)
 * steps. Returns the parameters with the lowest validation loss (training
 * loss when there is no validation set). Fully determined by spec.seed and
 * cfg.seed.
 */
inline TrainResult train(const ModelSpec& spec, std::span<const align::FeatureSequence> train_set,
                         std::span<const align::FeatureSequence> val_set, const TrainConfig& cfg,
                         const EpochCallback& on_epoch = {}) {
  require(!train_set.empty(), ErrorKind::InvalidArgument, "training set is empty");
  cfg.validate();
  TrainResult result;
  ModelParameters model = build_model(spec);
  result.initial_train_loss = mean_loss(model, train_set);
  result.model = model;
  if (cfg.epochs == 0) return result;

  double best = val_set.empty() ? result.initial_train_loss : mean_loss(model, val_set);
  OptimizerState state = OptimizerState::for_model(model, AdamHyper{cfg.base_lr});
  Rng rng(cfg.seed);
  const std::size_t batches = (train_set.size() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = cfg.epochs * batches;
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<const align::FeatureSequence*> batch;
      for (std::size_t k = b * cfg.batch_size; k < std::min(order.size(), (b + 1) * cfg.batch_size); ++k)
        batch.push_back(&train_set[order[k]]);
      if (cfg.grad_check && step == 0) {
        const double err = spot_check_gradients(model, batch, cfg.seed);
        require(err <= 1e-4, ErrorKind::Validation,
                "gradient check failed: relative error " + std::to_string(err));
      }
      auto lg = loss_and_gradients(model, batch, Mode::Train, &rng);
      if (cfg.grad_clip > 0.0) {
        const double norm = gradient_norm(lg.gradients);
        if (norm > cfg.grad_clip)
          for (auto& g : lg.gradients)
            for (auto& v : g.data()) v *= cfg.grad_clip / norm;
      }
      state.hyper.lr = cosine_lr(step, total_steps, cfg.base_lr);
      rec.learning_rate = state.hyper.lr;
      adam_step(model, lg.gradients, state);
      update_running_stats(model, lg.batch_norm);
      ++step;
    }
    rec.train_loss = mean_loss(model, train_set);
    rec.val_loss = val_set.empty() ? rec.train_loss : mean_loss(model, val_set);
    rec.val_f1_iou50 = f1_iou50(model, val_set, cfg.history_tau);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.val_loss < best) {
      best = rec.val_loss;
      result.model = model;
      result.best_epoch = epoch;
    }
  }
  return result;
}

}  // namespace newsreel::fusion
