// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "newsreel/align/align.hpp"
#include "newsreel/chaptering/distance.hpp"
#include "newsreel/error.hpp"
#include "newsreel/fusion/model.hpp"
#include "newsreel/fusion/tape.hpp"
#include "newsreel/random.hpp"

namespace newsreel::fusion {

/// Cosine distance matrix recorded on the tape; same formula as
/// chaptering::distance_matrix (without the final clamp).
inline Var distance_matrix_on_tape(Tape& t, Var features) {
  const std::size_t n = t.value(features).rows();
  const Var norms = t.sqrt(t.row_sum(t.square(features)));
  const Var unit = t.div_col_safe(features, norms);
  const Var cosine = t.matmul_nt(unit, unit);
  Tensor off_diagonal({n, n}, 1.0);
  for (std::size_t i = 0; i < n; ++i) off_diagonal(i, i) = 0.0;
  const Var d = t.scale(t.add_scalar(t.scale(cosine, -1.0), 1.0), 0.5);
  return t.mul(d, t.constant(std::move(off_diagonal)));
}

inline Var baf_loss_on_tape(Tape& t, Var d, const chaptering::TargetMatrix& target,
                            const chaptering::AdjacencySet& adjacency) {
  const Var diff = t.sub(d, t.constant(target.values));
  const Var masked = t.mul(t.square(diff), t.constant(adjacency.mask()));
  return t.sqrt(t.sum_all(masked));
}

struct LossAndGradients {
  double loss = 0.0;
  std::vector<Tensor> gradients;  // aligned with ModelParameters::params
  std::vector<BatchNormObservation> batch_norm;
  /// Smallest |relu input| in the forward pass (infinite without relus).
  double relu_margin = 0.0;
};

/**
 * @brief Mean block-adjacent Frobenius loss over a batch and its gradient
 * w.r.t. every model parameter.
 *
 * Sequences are kept at their own length, so no padded shot ever enters the
 * loss or the batch-norm statistics.
 */
inline LossAndGradients loss_and_gradients(const ModelParameters& model,
                                           std::span<const align::FeatureSequence* const> batch,
                                           Mode mode, Rng* rng, bool want_gradients = true) {
  require(!batch.empty(), ErrorKind::InvalidArgument, "empty batch");
  Tape t;
  const auto vars = bind_parameters(model, t, want_gradients);
  std::vector<Var> inputs;
  for (const auto* seq : batch) {
    require(seq->labels.has_value(), ErrorKind::InvalidArgument,
            "sequence " + seq->video_id + " has no chapter labels");
    require(seq->labels->size() == seq->length(), ErrorKind::DimensionMismatch,
            "sequence " + seq->video_id + " label count differs from shot count");
    inputs.push_back(t.constant(seq->features));
  }
  LossAndGradients out;
  const auto outputs = forward_batch(model, t, vars, inputs, mode, rng, &out.batch_norm);
  std::vector<Var> losses;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& labels = *batch[b]->labels;
    const Var d = distance_matrix_on_tape(t, outputs[b]);
    losses.push_back(baf_loss_on_tape(t, d, chaptering::target_matrix(labels), chaptering::adjacency_set(labels)));
  }
  const Var total = t.scale(t.sum_all(t.concat_rows(losses)), 1.0 / static_cast<double>(batch.size()));
  out.loss = t.value(total)[0];
  out.relu_margin = t.min_relu_margin();
  if (!want_gradients) return out;
  t.backward(total);
  out.gradients.reserve(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const Tensor& g = t.grad(vars[i]);
    out.gradients.push_back(g.empty() ? Tensor(model.params[i].value.shape(), 0.0) : g);
  }
  return out;
}

inline double batch_loss(const ModelParameters& model, std::span<const align::FeatureSequence* const> batch,
                         Mode mode, Rng* rng) {
  return loss_and_gradients(model, batch, mode, rng, false).loss;
}

}  // namespace newsreel::fusion
