// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "newsreel/error.hpp"
#include "newsreel/fusion/model.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::fusion {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::size_t step = 0;
  AdamHyper hyper;

  static OptimizerState for_model(const ModelParameters& model, AdamHyper hyper = {}) {
    OptimizerState s;
    s.hyper = hyper;
    for (const auto& p : model.params) {
      s.first_moment.emplace_back(p.value.shape(), 0.0);
      s.second_moment.emplace_back(p.value.shape(), 0.0);
    }
    return s;
  }
};

/// One bias-corrected Adam update of every tensor in `params`.
inline void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, OptimizerState& state) {
  require(params.size() == grads.size() && params.size() == state.first_moment.size(),
          ErrorKind::DimensionMismatch, "adam: parameter, gradient and moment counts differ");
  ++state.step;
  const auto& h = state.hyper;
  const double correction1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    const Tensor& g = grads[i];
    require(p.same_shape(g), ErrorKind::DimensionMismatch, "adam: gradient shape mismatch");
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = h.beta1 * m[k] + (1.0 - h.beta1) * g[k];
      v[k] = h.beta2 * v[k] + (1.0 - h.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      p[k] -= h.lr * m_hat / (std::sqrt(v_hat) + h.eps);
    }
  }
}

inline void adam_step(ModelParameters& model, std::span<const Tensor> grads, OptimizerState& state) {
  std::vector<Tensor> values;
  values.reserve(model.params.size());
  for (auto& p : model.params) values.push_back(std::move(p.value));
  adam_step(std::span<Tensor>(values), grads, state);
  for (std::size_t i = 0; i < values.size(); ++i) model.params[i].value = std::move(values[i]);
}

/// Half-cosine decay from base_lr at step 0 to 0 at total_steps.
inline double cosine_lr(std::size_t step, std::size_t total_steps, double base_lr) {
  require(total_steps > 0, ErrorKind::InvalidArgument, "cosine schedule needs total_steps > 0");
  require(step <= total_steps, ErrorKind::InvalidArgument, "step beyond the schedule");
  const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
  return base_lr * (1.0 + std::cos(std::numbers::pi * progress)) / 2.0;
}

}  // namespace newsreel::fusion
