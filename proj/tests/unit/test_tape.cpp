// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace newsreel;
using fusion::Tape;
using fusion::Var;

namespace {

Tensor random_tensor(Rng& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
  Tensor t = Tensor::matrix(r, c);
  for (auto& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

using Builder = std::function<Var(Tape&, std::vector<Var>&)>;

/// Records f on the given inputs, reduces it with fixed random weights, and
/// compares the tape gradient of every input to central differences.
void check_op(const std::string& name, std::vector<Tensor> inputs, const Builder& f, double tol = 1e-7) {
  Rng wrng(99);
  Tensor weights;
  const auto run = [&](const std::vector<Tensor>& xs, std::vector<Tensor>* grads) {
    Tape t;
    std::vector<Var> vars;
    for (const auto& x : xs) vars.push_back(t.variable(x));
    const Var out = f(t, vars);
    if (weights.empty()) weights = random_tensor(wrng, t.value(out).rows(), t.value(out).cols());
    const Var loss = t.sum_all(t.mul(out, t.constant(weights)));
    if (grads) {
      t.backward(loss);
      for (std::size_t i = 0; i < vars.size(); ++i) {
        const Tensor& g = t.grad(vars[i]);
        grads->push_back(g.empty() ? Tensor(xs[i].shape(), 0.0) : g);
      }
    }
    return t.value(loss)[0];
  };
  std::vector<Tensor> analytic;
  run(inputs, &analytic);
  const double h = 1e-6;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t k = 0; k < inputs[i].size(); ++k) {
      const double orig = inputs[i][k];
      inputs[i][k] = orig + h;
      const double up = run(inputs, nullptr);
      inputs[i][k] = orig - h;
      const double down = run(inputs, nullptr);
      inputs[i][k] = orig;
      const double numeric = (up - down) / (2 * h);
      EXPECT_NEAR(analytic[i][k], numeric, tol * std::max(1.0, std::abs(numeric)))
          << name << " input " << i << " entry " << k;
    }
  }
}

}  // namespace

TEST(Tape, LinearOps) {
  Rng rng(1);
  check_op("matmul", {random_tensor(rng, 3, 4), random_tensor(rng, 4, 5)},
           [](Tape& t, std::vector<Var>& v) { return t.matmul(v[0], v[1]); });
  check_op("matmul_nt", {random_tensor(rng, 3, 4), random_tensor(rng, 5, 4)},
           [](Tape& t, std::vector<Var>& v) { return t.matmul_nt(v[0], v[1]); });
  check_op("matmul_nt_self", {random_tensor(rng, 4, 3)},
           [](Tape& t, std::vector<Var>& v) { return t.matmul_nt(v[0], v[0]); });
  check_op("transpose", {random_tensor(rng, 3, 4)}, [](Tape& t, std::vector<Var>& v) { return t.transpose(v[0]); });
}

TEST(Tape, ElementwiseOpsWithBroadcast) {
  Rng rng(2);
  check_op("add", {random_tensor(rng, 3, 4), random_tensor(rng, 3, 4)},
           [](Tape& t, std::vector<Var>& v) { return t.add(v[0], v[1]); });
  check_op("add_bcast", {random_tensor(rng, 3, 4), random_tensor(rng, 1, 4)},
           [](Tape& t, std::vector<Var>& v) { return t.add(v[0], v[1]); });
  check_op("sub_bcast", {random_tensor(rng, 3, 4), random_tensor(rng, 1, 4)},
           [](Tape& t, std::vector<Var>& v) { return t.sub(v[0], v[1]); });
  check_op("mul", {random_tensor(rng, 3, 4), random_tensor(rng, 3, 4)},
           [](Tape& t, std::vector<Var>& v) { return t.mul(v[0], v[1]); });
  check_op("mul_bcast", {random_tensor(rng, 3, 4), random_tensor(rng, 1, 4)},
           [](Tape& t, std::vector<Var>& v) { return t.mul(v[0], v[1]); });
  check_op("div_row", {random_tensor(rng, 3, 4), random_tensor(rng, 1, 4, 0.5, 2.0)},
           [](Tape& t, std::vector<Var>& v) { return t.div_row(v[0], v[1]); });
  check_op("div_col_safe", {random_tensor(rng, 3, 4), random_tensor(rng, 3, 1, 0.5, 2.0)},
           [](Tape& t, std::vector<Var>& v) { return t.div_col_safe(v[0], v[1]); });
  check_op("scale", {random_tensor(rng, 2, 3)}, [](Tape& t, std::vector<Var>& v) { return t.scale(v[0], -2.5); });
  check_op("add_scalar", {random_tensor(rng, 2, 3)},
           [](Tape& t, std::vector<Var>& v) { return t.add_scalar(v[0], 0.7); });
}

TEST(Tape, Nonlinearities) {
  Rng rng(3);
  check_op("sigmoid", {random_tensor(rng, 3, 3, -3, 3)}, [](Tape& t, std::vector<Var>& v) { return t.sigmoid(v[0]); });
  check_op("tanh", {random_tensor(rng, 3, 3, -3, 3)}, [](Tape& t, std::vector<Var>& v) { return t.tanh(v[0]); });
  check_op("square", {random_tensor(rng, 3, 3)}, [](Tape& t, std::vector<Var>& v) { return t.square(v[0]); });
  check_op("sqrt", {random_tensor(rng, 3, 3, 0.2, 3)}, [](Tape& t, std::vector<Var>& v) { return t.sqrt(v[0]); });
  Tensor away = random_tensor(rng, 3, 3, 0.1, 1.0);
  for (std::size_t i = 0; i < away.size(); i += 2) away[i] = -away[i];
  check_op("relu", {away}, [](Tape& t, std::vector<Var>& v) { return t.relu(v[0]); });
}

TEST(Tape, ReductionsAndStructure) {
  Rng rng(4);
  check_op("sum_all", {random_tensor(rng, 3, 4)}, [](Tape& t, std::vector<Var>& v) { return t.sum_all(v[0]); });
  check_op("row_sum", {random_tensor(rng, 3, 4)}, [](Tape& t, std::vector<Var>& v) { return t.row_sum(v[0]); });
  check_op("mean_rows", {random_tensor(rng, 3, 4)}, [](Tape& t, std::vector<Var>& v) { return t.mean_rows(v[0]); });
  check_op("concat_cols", {random_tensor(rng, 3, 2), random_tensor(rng, 3, 4)},
           [](Tape& t, std::vector<Var>& v) { return t.concat_cols(v); });
  check_op("concat_rows", {random_tensor(rng, 2, 3), random_tensor(rng, 4, 3)},
           [](Tape& t, std::vector<Var>& v) { return t.concat_rows(v); });
  check_op("slice_rows", {random_tensor(rng, 5, 3)}, [](Tape& t, std::vector<Var>& v) { return t.slice_rows(v[0], 1, 4); });
  check_op("slice_cols", {random_tensor(rng, 3, 6)}, [](Tape& t, std::vector<Var>& v) { return t.slice_cols(v[0], 2, 5); });
}

TEST(Tape, SharedNodesAccumulateGradients) {
  Tape t;
  const Var x = t.variable(Tensor({1, 1}, 3.0));
  const Var y = t.add(t.mul(x, x), t.scale(x, 2.0));  // x^2 + 2x
  t.backward(y);
  EXPECT_DOUBLE_EQ(t.grad(x)[0], 8.0);
}

TEST(Tape, ConstantsGetNoGradient) {
  Tape t;
  const Var c = t.constant(Tensor({1, 2}, 1.0));
  const Var x = t.variable(Tensor({1, 2}, 2.0));
  t.backward(t.sum_all(t.mul(c, x)));
  EXPECT_TRUE(t.grad(c).empty());
  EXPECT_EQ(t.grad(x), Tensor({1, 2}, 1.0));
}

TEST(Tape, SafeDivisionAndSqrtAtZero) {
  Tape t;
  const Var a = t.variable(Tensor({2, 2}, std::vector<double>{0, 0, 3, 4}));
  const Var norms = t.sqrt(t.row_sum(t.square(a)));
  const Var unit = t.div_col_safe(a, norms);
  EXPECT_EQ(t.value(unit)(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(t.value(unit)(1, 0), 0.6);
  t.backward(t.sum_all(unit));
  EXPECT_TRUE(t.grad(a).all_finite());
  EXPECT_EQ(t.grad(a)(0, 0), 0.0);
}

TEST(Tape, ShapeErrors) {
  Tape t;
  const Var a = t.variable(Tensor::matrix(2, 3));
  const Var b = t.variable(Tensor::matrix(2, 3));
  EXPECT_THROW(t.matmul(a, b), Error);
  EXPECT_THROW(t.add(a, t.variable(Tensor::matrix(3, 3))), Error);
  EXPECT_THROW(t.backward(a), Error);
}

TEST(Tape, ReluMarginTracksSmallestInput) {
  Tape t;
  EXPECT_TRUE(std::isinf(t.min_relu_margin()));
  t.relu(t.variable(Tensor({1, 3}, std::vector<double>{-0.5, 0.02, 1.0})));
  EXPECT_DOUBLE_EQ(t.min_relu_margin(), 0.02);
}
