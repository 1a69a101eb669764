// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "newsreel/error.hpp"
#include "newsreel/fusion/tape.hpp"
#include "newsreel/random.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::fusion {

enum class Architecture { DNN, BiLSTM };
enum class Mode { Train, Eval };

inline std::string to_string(Architecture a) { return a == Architecture::DNN ? "dnn" : "bilstm"; }

inline Architecture architecture_from_string(const std::string& s) {
  if (s == "dnn" || s == "DNN") return Architecture::DNN;
  if (s == "bilstm" || s == "BiLSTM") return Architecture::BiLSTM;
  throw Error(ErrorKind::InvalidArgument, "unknown architecture '" + s + "' (expected dnn or bilstm)");
}

struct ModelSpec {
  Architecture architecture = Architecture::BiLSTM;
  std::size_t input_dim = 1833;
  std::size_t hidden_dim = 128;
  std::size_t layers = 3;
  std::vector<std::size_t> dnn_dims{4000, 3000, 1000};
  std::size_t projection_dim = 128;
  double dropout = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    require(input_dim >= 1 && hidden_dim >= 1 && layers >= 1 && projection_dim >= 1,
            ErrorKind::InvalidArgument, "model dimensions must be >= 1");
    for (auto d : dnn_dims) require(d >= 1, ErrorKind::InvalidArgument, "dnn dims must be >= 1");
    require(architecture != Architecture::DNN || !dnn_dims.empty(), ErrorKind::InvalidArgument,
            "dnn needs at least one hidden layer");
    require(dropout >= 0.0 && dropout < 1.0, ErrorKind::InvalidArgument, "dropout must lie in [0, 1)");
  }

  bool operator==(const ModelSpec&) const = default;
};

inline nlohmann::json spec_to_json(const ModelSpec& s) {
  return {{"architecture", to_string(s.architecture)},
          {"input_dim", s.input_dim},
          {"hidden_dim", s.hidden_dim},
          {"layers", s.layers},
          {"dnn_dims", s.dnn_dims},
          {"projection_dim", s.projection_dim},
          {"dropout", s.dropout},
          {"seed", s.seed}};
}

inline ModelSpec spec_from_json(const nlohmann::json& j) {
  ModelSpec s;
  try {
    s.architecture = architecture_from_string(j.at("architecture").get<std::string>());
    s.input_dim = j.at("input_dim").get<std::size_t>();
    s.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    s.layers = j.at("layers").get<std::size_t>();
    s.dnn_dims = j.at("dnn_dims").get<std::vector<std::size_t>>();
    s.projection_dim = j.at("projection_dim").get<std::size_t>();
    s.dropout = j.at("dropout").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Malformed, std::string("model spec: ") + e.what());
  }
  s.validate();
  return s;
}

struct NamedTensor {
  std::string name;
  Tensor value;
};

/**
 * @brief Trainable weights plus non-trainable buffers (batch-norm running
 * statistics) of one fusion model.
 *
 * Parameter order is fixed by the ModelSpec and is the order gradients, optimizer
 * moments and checkpoints use.
 */
struct ModelParameters {
  ModelSpec spec;
  std::vector<NamedTensor> params;
  std::vector<NamedTensor> buffers;
  Mode mode = Mode::Eval;

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i].name == name) return i;
    throw Error(ErrorKind::InvalidArgument, "no parameter named " + name);
  }

  Tensor& buffer(const std::string& name) {
    for (auto& b : buffers)
      if (b.name == name) return b.value;
    throw Error(ErrorKind::InvalidArgument, "no buffer named " + name);
  }

  const Tensor& buffer(const std::string& name) const {
    for (const auto& b : buffers)
      if (b.name == name) return b.value;
    throw Error(ErrorKind::InvalidArgument, "no buffer named " + name);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params) n += p.value.size();
    return n;
  }
};

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

namespace detail {

inline std::string lstm_name(std::size_t layer, bool backward, const char* what) {
  return "lstm.l" + std::to_string(layer) + (backward ? ".bwd." : ".fwd.") + what;
}

inline std::string dnn_name(std::size_t block, const char* what) {
  return "dnn.b" + std::to_string(block) + "." + what;
}

inline Tensor uniform_matrix(Rng& rng, std::size_t rows, std::size_t cols, double bound) {
  Tensor t = Tensor::matrix(rows, cols);
  for (auto& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace detail

/// Closed-form trainable parameter count (one bias vector per LSTM gate set).
inline std::size_t expected_parameter_count(const ModelSpec& s) {
  std::size_t n = 0;
  if (s.architecture == Architecture::BiLSTM) {
    const std::size_t h = s.hidden_dim;
    for (std::size_t l = 0; l < s.layers; ++l) {
      const std::size_t in = l == 0 ? s.input_dim : 2 * h;
      n += 2 * (4 * h * (in + h + 1));
    }
    n += 2 * h * s.projection_dim + s.projection_dim;
  } else {
    std::size_t in = s.input_dim;
    for (auto d : s.dnn_dims) {
      n += in * d + d + 2 * d;  // linear + batch-norm scale/shift
      in = d;
    }
    n += in * s.projection_dim + s.projection_dim;
  }
  return n;
}

/**
 * @brief Initialize a model deterministically from spec.seed.
 *
 * Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases 0, LSTM forget-gate
 * bias +1, batch-norm scale 1 / shift 0, running mean 0 / variance 1.
 */
inline ModelParameters build_model(const ModelSpec& spec) {
  spec.validate();
  ModelParameters m;
  m.spec = spec;
  Rng rng(spec.seed);
  const auto add = [&](std::string name, Tensor t) { m.params.push_back({std::move(name), std::move(t)}); };
  std::size_t head_in = 0;
  if (spec.architecture == Architecture::BiLSTM) {
    const std::size_t h = spec.hidden_dim;
    for (std::size_t l = 0; l < spec.layers; ++l) {
      const std::size_t in = l == 0 ? spec.input_dim : 2 * h;
      for (bool bwd : {false, true}) {
        add(detail::lstm_name(l, bwd, "w_ih"),
            detail::uniform_matrix(rng, in, 4 * h, 1.0 / std::sqrt(static_cast<double>(in))));
        add(detail::lstm_name(l, bwd, "w_hh"),
            detail::uniform_matrix(rng, h, 4 * h, 1.0 / std::sqrt(static_cast<double>(h))));
        Tensor bias = Tensor::matrix(1, 4 * h);
        for (std::size_t k = h; k < 2 * h; ++k) bias[k] = 1.0;
        add(detail::lstm_name(l, bwd, "bias"), std::move(bias));
      }
    }
    head_in = 2 * h;
  } else {
    std::size_t in = spec.input_dim;
    for (std::size_t b = 0; b < spec.dnn_dims.size(); ++b) {
      const std::size_t out = spec.dnn_dims[b];
      add(detail::dnn_name(b, "weight"),
          detail::uniform_matrix(rng, in, out, 1.0 / std::sqrt(static_cast<double>(in))));
      add(detail::dnn_name(b, "bias"), Tensor::matrix(1, out));
      add(detail::dnn_name(b, "bn_scale"), Tensor({1, out}, 1.0));
      add(detail::dnn_name(b, "bn_shift"), Tensor::matrix(1, out));
      m.buffers.push_back({detail::dnn_name(b, "bn_running_mean"), Tensor::matrix(1, out)});
      m.buffers.push_back({detail::dnn_name(b, "bn_running_var"), Tensor({1, out}, 1.0)});
      in = out;
    }
    head_in = in;
  }
  add("head.weight", detail::uniform_matrix(rng, head_in, spec.projection_dim,
                                            1.0 / std::sqrt(static_cast<double>(head_in))));
  add("head.bias", Tensor::matrix(1, spec.projection_dim));
  return m;
}

/// Batch statistics observed by a train-mode DNN forward, one entry per
/// batch-norm layer, to be folded into the running buffers by the caller.
struct BatchNormObservation {
  std::size_t block;
  Tensor mean;
  Tensor var;
};

namespace detail {

inline Var dropout(Tape& t, Var x, double rate, Mode mode, Rng* rng) {
  if (mode == Mode::Eval || rate <= 0.0) return x;
  require(rng != nullptr, ErrorKind::InvalidArgument, "train-mode dropout needs an rng");
  Tensor mask(t.value(x).shape(), 0.0);
  const double keep = 1.0 - rate;
  for (auto& v : mask.data()) v = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
  return t.mul(x, t.constant(std::move(mask)));
}

inline Var lstm_direction(Tape& t, Var x, Var w_ih, Var w_hh, Var bias, std::size_t h, bool reverse) {
  const std::size_t steps = t.value(x).rows();
  const Var projected = t.add(t.matmul(x, w_ih), bias);
  Var hidden = t.constant(Tensor::matrix(1, h));
  Var cell = t.constant(Tensor::matrix(1, h));
  std::vector<Var> outputs(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t idx = reverse ? steps - 1 - s : s;
    const Var z = t.add(t.slice_rows(projected, idx, idx + 1), t.matmul(hidden, w_hh));
    const Var in_gate = t.sigmoid(t.slice_cols(z, 0, h));
    const Var forget_gate = t.sigmoid(t.slice_cols(z, h, 2 * h));
    const Var candidate = t.tanh(t.slice_cols(z, 2 * h, 3 * h));
    const Var out_gate = t.sigmoid(t.slice_cols(z, 3 * h, 4 * h));
    cell = t.add(t.mul(forget_gate, cell), t.mul(in_gate, candidate));
    hidden = t.mul(out_gate, t.tanh(cell));
    outputs[idx] = hidden;
  }
  return t.concat_rows(outputs);
}

}  // namespace detail

/**
 * @brief Record the model on `tape` for a batch of T_b x input_dim inputs.
 *
 * `param_vars` must hold one tape node per entry of model.params, in order.
 * The DNN normalizes over all shots of the batch at once (train mode), the
 * BiLSTM runs each sequence independently. Returns T_b x projection_dim
 * outputs in batch order.
 */
inline std::vector<Var> forward_batch(const ModelParameters& model, Tape& t, std::span<const Var> param_vars,
                                      std::span<const Var> inputs, Mode mode, Rng* rng,
                                      std::vector<BatchNormObservation>* observed = nullptr) {
  const auto& spec = model.spec;
  require(param_vars.size() == model.params.size(), ErrorKind::InvalidArgument,
          "parameter nodes do not match the model");
  for (Var x : inputs) {
    require(t.value(x).cols() == spec.input_dim && t.value(x).rows() >= 1, ErrorKind::DimensionMismatch,
            "model expects T x " + std::to_string(spec.input_dim) + " input, got " + shape_string(t.value(x)));
  }
  const auto p = [&](const std::string& name) { return param_vars[model.index_of(name)]; };
  std::vector<Var> outputs;

  if (spec.architecture == Architecture::BiLSTM) {
    for (Var x : inputs) {
      Var layer_in = x;
      for (std::size_t l = 0; l < spec.layers; ++l) {
        if (l > 0) layer_in = detail::dropout(t, layer_in, spec.dropout, mode, rng);
        const Var fwd = detail::lstm_direction(t, layer_in, p(detail::lstm_name(l, false, "w_ih")),
                                               p(detail::lstm_name(l, false, "w_hh")),
                                               p(detail::lstm_name(l, false, "bias")), spec.hidden_dim, false);
        const Var bwd = detail::lstm_direction(t, layer_in, p(detail::lstm_name(l, true, "w_ih")),
                                               p(detail::lstm_name(l, true, "w_hh")),
                                               p(detail::lstm_name(l, true, "bias")), spec.hidden_dim, true);
        const Var both[] = {fwd, bwd};
        layer_in = t.concat_cols(both);
      }
      layer_in = detail::dropout(t, layer_in, spec.dropout, mode, rng);
      outputs.push_back(t.add(t.matmul(layer_in, p("head.weight")), p("head.bias")));
    }
    return outputs;
  }

  Var h = inputs.size() == 1 ? inputs[0] : t.concat_rows(inputs);
  for (std::size_t b = 0; b < spec.dnn_dims.size(); ++b) {
    h = t.add(t.matmul(h, p(detail::dnn_name(b, "weight"))), p(detail::dnn_name(b, "bias")));
    Var normalized;
    if (mode == Mode::Train) {
      const Var mean = t.mean_rows(h);
      const Var centered = t.sub(h, mean);
      const Var var = t.mean_rows(t.square(centered));
      normalized = t.div_row(centered, t.sqrt(t.add_scalar(var, kBatchNormEps)));
      if (observed) observed->push_back({b, t.value(mean), t.value(var)});
    } else {
      const Tensor& rm = model.buffer(detail::dnn_name(b, "bn_running_mean"));
      Tensor rs = model.buffer(detail::dnn_name(b, "bn_running_var"));
      for (auto& v : rs.data()) v = std::sqrt(v + kBatchNormEps);
      normalized = t.div_row(t.sub(h, t.constant(rm)), t.constant(std::move(rs)));
    }
    h = t.add(t.mul(normalized, p(detail::dnn_name(b, "bn_scale"))), p(detail::dnn_name(b, "bn_shift")));
    h = t.relu(h);
    h = detail::dropout(t, h, spec.dropout, mode, rng);
  }
  const Var projected = t.add(t.matmul(h, p("head.weight")), p("head.bias"));
  if (inputs.size() == 1) return {projected};
  std::size_t offset = 0;
  for (Var x : inputs) {
    const std::size_t rows = t.value(x).rows();
    outputs.push_back(t.slice_rows(projected, offset, offset + rows));
    offset += rows;
  }
  return outputs;
}

/// Parameters as tape variables (trainable) or constants.
inline std::vector<Var> bind_parameters(const ModelParameters& model, Tape& t, bool trainable) {
  std::vector<Var> vars;
  vars.reserve(model.params.size());
  for (const auto& p : model.params) vars.push_back(trainable ? t.variable(p.value) : t.constant(p.value));
  return vars;
}

/// Per-shot fused features for one T x input_dim sequence.
inline Tensor forward(const ModelParameters& model, const Tensor& input, Mode mode = Mode::Eval,
                      Rng* rng = nullptr) {
  Tape t;
  const auto vars = bind_parameters(model, t, false);
  const Var x = t.constant(input);
  const Var xs[] = {x};
  return t.value(forward_batch(model, t, vars, xs, mode, rng).front());
}

/// Fold observed batch statistics into the running buffers.
inline void update_running_stats(ModelParameters& model, std::span<const BatchNormObservation> observed) {
  for (const auto& o : observed) {
    Tensor& rm = model.buffer(detail::dnn_name(o.block, "bn_running_mean"));
    Tensor& rv = model.buffer(detail::dnn_name(o.block, "bn_running_var"));
    for (std::size_t k = 0; k < rm.size(); ++k) {
      rm[k] = (1.0 - kBatchNormMomentum) * rm[k] + kBatchNormMomentum * o.mean[k];
      rv[k] = (1.0 - kBatchNormMomentum) * rv[k] + kBatchNormMomentum * o.var[k];
    }
  }
}

}  // namespace newsreel::fusion
