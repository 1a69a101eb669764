// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "newsreel/error.hpp"
#include "newsreel/tensor.hpp"

namespace newsreel::fusion {

/// Handle to a node recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/**
 * @brief Reverse-mode automatic differentiation over rank-2 tensors.
 *
 * Every op evaluates eagerly and records a closure that pushes the output
 * gradient back to its inputs. Nodes are appended in topological order, so
 * backward() is a single reverse sweep. Gradients are only materialized for
 * nodes that (transitively) depend on a variable.
 *
 * Row-vector operands (1 x n) broadcast over the rows of the other operand
 * in add/sub/mul/div_row.
 */
class Tape {
 public:
  Var variable(Tensor value) { return push(std::move(value), true, nullptr); }
  Var constant(Tensor value) { return push(std::move(value), false, nullptr); }

  const Tensor& value(Var v) const { return nodes_[v.id].value; }

  /// Gradient of the last backward() target w.r.t. v; empty if v is unreachable.
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }

  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  std::size_t size() const { return nodes_.size(); }

  /// Seed d(output)/d(output) = 1 and sweep. `output` must be 1 x 1.
  void backward(Var output) {
    require(value(output).size() == 1, ErrorKind::InvalidArgument, "backward needs a scalar output");
    for (auto& n : nodes_) n.grad = Tensor();
    if (!nodes_[output.id].requires_grad) return;
    nodes_[output.id].grad = Tensor(value(output).shape(), 1.0);
    for (std::size_t i = output.id + 1; i-- > 0;) {
      auto& node = nodes_[i];
      if (!node.backward || node.grad.empty()) continue;
      node.backward(*this, node.grad);
    }
  }

  // ---------------------------------------------------------------- linear

  Var matmul(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require(A.cols() == B.rows(), ErrorKind::DimensionMismatch,
            "matmul " + shape_string(A) + " x " + shape_string(B));
    Tensor C = Tensor::matrix(A.rows(), B.cols());
    gemm_nn(A, B, C);
    return push_op(std::move(C), {a, b}, [a, b](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a)) gemm_nt(g, t.value(b), *ga);
      if (Tensor* gb = t.grad_slot(b)) gemm_tn(t.value(a), g, *gb);
    });
  }

  /// a * b^T
  Var matmul_nt(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require(A.cols() == B.cols(), ErrorKind::DimensionMismatch,
            "matmul_nt " + shape_string(A) + " x " + shape_string(B) + "^T");
    Tensor C = Tensor::matrix(A.rows(), B.rows());
    gemm_nt(A, B, C);
    return push_op(std::move(C), {a, b}, [a, b](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a)) gemm_nn(g, t.value(b), *ga);
      if (Tensor* gb = t.grad_slot(b)) gemm_tn(g, t.value(a), *gb);
    });
  }

  Var transpose(Var a) {
    const Tensor& A = value(a);
    Tensor out = Tensor::matrix(A.cols(), A.rows());
    for (std::size_t r = 0; r < A.rows(); ++r)
      for (std::size_t c = 0; c < A.cols(); ++c) out(c, r) = A(r, c);
    return push_op(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t r = 0; r < ga->rows(); ++r)
          for (std::size_t c = 0; c < ga->cols(); ++c) (*ga)(r, c) += g(c, r);
    });
  }

  // ------------------------------------------------------------ elementwise

  Var add(Var a, Var b) { return add_sub(a, b, 1.0); }
  Var sub(Var a, Var b) { return add_sub(a, b, -1.0); }

  Var mul(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    const bool bcast = check_broadcast(A, B, "mul");
    Tensor out = A;
    const std::size_t n = A.cols();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[bcast ? i % n : i];
    return push_op(std::move(out), {a, b}, [a, b, bcast](Tape& t, const Tensor& g) {
      const Tensor& A = t.value(a);
      const Tensor& B = t.value(b);
      const std::size_t n = A.cols();
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * B[bcast ? i % n : i];
      if (Tensor* gb = t.grad_slot(b))
        for (std::size_t i = 0; i < g.size(); ++i) (*gb)[bcast ? i % n : i] += g[i] * A[i];
    });
  }

  /// a / b with b a row vector broadcast over the rows of a.
  Var div_row(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require(B.rows() == 1 && B.cols() == A.cols(), ErrorKind::DimensionMismatch,
            "div_row " + shape_string(A) + " / " + shape_string(B));
    Tensor out = A;
    const std::size_t n = A.cols();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= B[i % n];
    return push_op(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
      const Tensor& A = t.value(a);
      const Tensor& B = t.value(b);
      const std::size_t n = A.cols();
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] / B[i % n];
      if (Tensor* gb = t.grad_slot(b))
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double d = B[i % n];
          (*gb)[i % n] -= g[i] * A[i] / (d * d);
        }
    });
  }

  /// Each row of a divided by the matching entry of column vector c; rows
  /// with c == 0 map to zero and pass no gradient.
  Var div_col_safe(Var a, Var c) {
    const Tensor& A = value(a);
    const Tensor& C = value(c);
    require(C.cols() == 1 && C.rows() == A.rows(), ErrorKind::DimensionMismatch,
            "div_col " + shape_string(A) + " / " + shape_string(C));
    Tensor out = A;
    for (std::size_t r = 0; r < A.rows(); ++r)
      for (std::size_t k = 0; k < A.cols(); ++k) out(r, k) = C[r] == 0.0 ? 0.0 : A(r, k) / C[r];
    return push_op(std::move(out), {a, c}, [a, c](Tape& t, const Tensor& g) {
      const Tensor& A = t.value(a);
      const Tensor& C = t.value(c);
      Tensor* ga = t.grad_slot(a);
      Tensor* gc = t.grad_slot(c);
      for (std::size_t r = 0; r < A.rows(); ++r) {
        const double d = C[r];
        if (d == 0.0) continue;
        for (std::size_t k = 0; k < A.cols(); ++k) {
          if (ga) (*ga)(r, k) += g(r, k) / d;
          if (gc) (*gc)[r] -= g(r, k) * A(r, k) / (d * d);
        }
      }
    });
  }

  Var scale(Var a, double s) {
    Tensor out = value(a);
    for (auto& v : out.data()) v *= s;
    return push_op(std::move(out), {a}, [a, s](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += s * g[i];
    });
  }

  Var add_scalar(Var a, double s) {
    Tensor out = value(a);
    for (auto& v : out.data()) v += s;
    return push_op(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    });
  }

  Var sigmoid(Var a) {
    return unary(a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
                 [](double, double y) { return y * (1.0 - y); });
  }

  Var tanh(Var a) {
    return unary(a, [](double x) { return std::tanh(x); },
                 [](double, double y) { return 1.0 - y * y; });
  }

  Var relu(Var a) {
    for (double x : value(a).data()) relu_margin_ = std::min(relu_margin_, std::abs(x));
    return unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
                 [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
  }

  Var square(Var a) {
    return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
  }

  /// Derivative at 0 is taken as 0 so that an exact zero loss has zero
  /// gradient.
  Var sqrt(Var a) {
    return unary(a, [](double x) { return std::sqrt(x); },
                 [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
  }

  // ------------------------------------------------------------- reductions

  Var sum_all(Var a) {
    double s = 0.0;
    for (double v : value(a).data()) s += v;
    return push_op(Tensor({1, 1}, s), {a}, [a](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a))
        for (auto& v : ga->data()) v += g[0];
    });
  }

  /// Sum over columns: T x n -> T x 1.
  Var row_sum(Var a) {
    const Tensor& A = value(a);
    Tensor out = Tensor::matrix(A.rows(), 1);
    for (std::size_t r = 0; r < A.rows(); ++r)
      for (std::size_t c = 0; c < A.cols(); ++c) out[r] += A(r, c);
    return push_op(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t r = 0; r < ga->rows(); ++r)
          for (std::size_t c = 0; c < ga->cols(); ++c) (*ga)(r, c) += g[r];
    });
  }

  /// Mean over rows: T x n -> 1 x n.
  Var mean_rows(Var a) {
    const Tensor& A = value(a);
    const double inv = 1.0 / static_cast<double>(A.rows());
    Tensor out = Tensor::matrix(1, A.cols());
    for (std::size_t r = 0; r < A.rows(); ++r)
      for (std::size_t c = 0; c < A.cols(); ++c) out[c] += A(r, c) * inv;
    return push_op(std::move(out), {a}, [a, inv](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t r = 0; r < ga->rows(); ++r)
          for (std::size_t c = 0; c < ga->cols(); ++c) (*ga)(r, c) += g[c] * inv;
    });
  }

  // -------------------------------------------------------------- structure

  Var concat_cols(std::span<const Var> parts) {
    require(!parts.empty(), ErrorKind::InvalidArgument, "concat of nothing");
    const std::size_t rows = value(parts[0]).rows();
    std::size_t cols = 0;
    for (Var p : parts) {
      require(value(p).rows() == rows, ErrorKind::DimensionMismatch, "concat_cols row mismatch");
      cols += value(p).cols();
    }
    Tensor out = Tensor::matrix(rows, cols);
    std::size_t off = 0;
    for (Var p : parts) {
      const Tensor& P = value(p);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < P.cols(); ++c) out(r, off + c) = P(r, c);
      off += P.cols();
    }
    std::vector<Var> inputs(parts.begin(), parts.end());
    return push_op(std::move(out), inputs, [inputs](Tape& t, const Tensor& g) {
      std::size_t off = 0;
      for (Var p : inputs) {
        const std::size_t w = t.value(p).cols();
        if (Tensor* gp = t.grad_slot(p))
          for (std::size_t r = 0; r < gp->rows(); ++r)
            for (std::size_t c = 0; c < w; ++c) (*gp)(r, c) += g(r, off + c);
        off += w;
      }
    });
  }

  Var concat_rows(std::span<const Var> parts) {
    require(!parts.empty(), ErrorKind::InvalidArgument, "concat of nothing");
    const std::size_t cols = value(parts[0]).cols();
    std::size_t rows = 0;
    for (Var p : parts) {
      require(value(p).cols() == cols, ErrorKind::DimensionMismatch, "concat_rows column mismatch");
      rows += value(p).rows();
    }
    Tensor out = Tensor::matrix(rows, cols);
    std::size_t off = 0;
    for (Var p : parts) {
      const auto& src = value(p).data();
      std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(off * cols));
      off += value(p).rows();
    }
    std::vector<Var> inputs(parts.begin(), parts.end());
    return push_op(std::move(out), inputs, [inputs](Tape& t, const Tensor& g) {
      std::size_t off = 0;
      for (Var p : inputs) {
        const std::size_t n = t.value(p).size();
        if (Tensor* gp = t.grad_slot(p))
          for (std::size_t i = 0; i < n; ++i) (*gp)[i] += g[off + i];
        off += n;
      }
    });
  }

  Var slice_rows(Var a, std::size_t begin, std::size_t end) {
    const Tensor& A = value(a);
    require(begin < end && end <= A.rows(), ErrorKind::InvalidArgument, "slice_rows out of range");
    const std::size_t cols = A.cols();
    Tensor out({end - begin, cols},
               std::vector<double>(A.data().begin() + static_cast<std::ptrdiff_t>(begin * cols),
                                   A.data().begin() + static_cast<std::ptrdiff_t>(end * cols)));
    return push_op(std::move(out), {a}, [a, begin, cols](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[begin * cols + i] += g[i];
    });
  }

  Var slice_cols(Var a, std::size_t begin, std::size_t end) {
    const Tensor& A = value(a);
    require(begin < end && end <= A.cols(), ErrorKind::InvalidArgument, "slice_cols out of range");
    Tensor out = Tensor::matrix(A.rows(), end - begin);
    for (std::size_t r = 0; r < A.rows(); ++r)
      for (std::size_t c = begin; c < end; ++c) out(r, c - begin) = A(r, c);
    return push_op(std::move(out), {a}, [a, begin](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) (*ga)(r, begin + c) += g(r, c);
    });
  }

  // ------------------------------------------------------- dense kernels

  /// C += A * B
  static void gemm_nn(const Tensor& A, const Tensor& B, Tensor& C) {
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    const double* a = A.data().data();
    const double* b = B.data().data();
    double* c = C.data().data();
    for (std::size_t i = 0; i < m; ++i) {
      double* crow = c + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = a[i * k + p];
        if (av == 0.0) continue;
        const double* brow = b + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  }

  /// C += A * B^T
  static void gemm_nt(const Tensor& A, const Tensor& B, Tensor& C) {
    const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
    const double* a = A.data().data();
    const double* b = B.data().data();
    double* c = C.data().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[j * k + p];
        c[i * n + j] += s;
      }
  }

  /// C += A^T * B
  static void gemm_tn(const Tensor& A, const Tensor& B, Tensor& C) {
    const std::size_t k = A.rows(), m = A.cols(), n = B.cols();
    const double* a = A.data().data();
    const double* b = B.data().data();
    double* c = C.data().data();
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t i = 0; i < m; ++i) {
        const double av = a[p * m + i];
        if (av == 0.0) continue;
        double* crow = c + i * n;
        const double* brow = b + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
  }

  /// Smallest |input| seen by any relu on this tape; finite differences with
  /// a step above this value may straddle the kink.
  double min_relu_margin() const { return relu_margin_; }

 private:
  using Backward = std::function<void(Tape&, const Tensor&)>;

  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    Backward backward;
  };

  Var push(Tensor value, bool requires_grad, Backward backward) {
    nodes_.push_back({std::move(value), Tensor(), requires_grad, std::move(backward)});
    return Var{nodes_.size() - 1};
  }

  Var push_op(Tensor value, std::initializer_list<Var> inputs, Backward backward) {
    bool needs = false;
    for (Var v : inputs) needs = needs || nodes_[v.id].requires_grad;
    return push(std::move(value), needs, needs ? std::move(backward) : nullptr);
  }

  Var push_op(Tensor value, const std::vector<Var>& inputs, Backward backward) {
    bool needs = false;
    for (Var v : inputs) needs = needs || nodes_[v.id].requires_grad;
    return push(std::move(value), needs, needs ? std::move(backward) : nullptr);
  }

  Tensor* grad_slot(Var v) {
    auto& n = nodes_[v.id];
    if (!n.requires_grad) return nullptr;
    if (n.grad.empty()) n.grad = Tensor(n.value.shape(), 0.0);
    return &n.grad;
  }

  static bool check_broadcast(const Tensor& A, const Tensor& B, const char* op) {
    if (A.same_shape(B)) return false;
    require(B.rows() == 1 && B.cols() == A.cols(), ErrorKind::DimensionMismatch,
            std::string(op) + " " + shape_string(A) + " with " + shape_string(B));
    return true;
  }

  Var add_sub(Var a, Var b, double sign) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    const bool bcast = check_broadcast(A, B, sign > 0 ? "add" : "sub");
    Tensor out = A;
    const std::size_t n = A.cols();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sign * B[bcast ? i % n : i];
    return push_op(std::move(out), {a, b}, [a, b, bcast, sign](Tape& t, const Tensor& g) {
      const std::size_t n = t.value(a).cols();
      if (Tensor* ga = t.grad_slot(a))
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
      if (Tensor* gb = t.grad_slot(b))
        for (std::size_t i = 0; i < g.size(); ++i) (*gb)[bcast ? i % n : i] += sign * g[i];
    });
  }

  template <typename F, typename DF>
  Var unary(Var a, F f, DF df) {
    Tensor out = value(a);
    for (auto& v : out.data()) v = f(v);
    return push_op(std::move(out), {a}, [a, df, self = nodes_.size()](Tape& t, const Tensor& g) {
      if (Tensor* ga = t.grad_slot(a)) {
        const Tensor& x = t.value(a);
        const Tensor& y = t.nodes_[self].value;
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * df(x[i], y[i]);
      }
    });
  }

  std::vector<Node> nodes_;
  double relu_margin_ = std::numeric_limits<double>::infinity();
};

}  // namespace newsreel::fusion
