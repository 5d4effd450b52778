// Copyright 2026 The ed2lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ed2/numcore/tensor.hpp"

namespace ed2::numcore {

/// Handle to a node recorded on a Graph.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode tape for one forward/backward pass.
///
/// A Graph lives for exactly one forward computation. Leaves are either
/// constants (no gradient wanted) or parameters bound by reference to a
/// Tensor; backward() accumulates d(loss)/d(param) into that Tensor's grad
/// buffer. The bound tensors must outlive the Graph and must not be modified
/// between the forward ops and backward().
///
/// Matrices are rank-2 row-major [rows, cols]; a batch of vectors is one row
/// per sample.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  Var constant(Tensor value);
  Var parameter(Tensor& param);
  /// Like constant() but without copying; `value` must outlive the Graph.
  Var constant_view(const Tensor& value);

  const Tensor& value(Var v) const;
  /// Gradient of the last backward() loss with respect to v (empty if v does
  /// not depend on any parameter).
  std::span<const double> grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t node_count() const { return nodes_.size(); }

  /// [n,k] x [k,m] -> [n,m]
  Var matmul(Var x, Var w);
  /// Adds a length-m bias to every row of an [n,m] matrix.
  Var add_bias(Var x, Var bias);
  /// Fused x W + b, optionally followed by ReLU.
  Var dense(Var x, Var w, Var bias, bool relu);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var relu(Var a);
  Var tanh(Var a);
  Var square(Var a);
  /// Elementwise Huber penalty: 0.5 e^2 if |e| <= delta, else delta (|e| - 0.5 delta).
  Var huber(Var a, double delta);
  Var minimum(Var a, Var b);
  /// [n,p] ++ [n,q] -> [n,p+q]
  Var concat_cols(Var a, Var b);
  /// Divides each row by its mean absolute value when that mean exceeds 1.
  Var rescale_rows_mean_abs(Var a);
  Var sum(Var a);
  Var mean(Var a);

  /// Runs reverse accumulation from a single-element loss.
  void backward(Var loss);

 private:
  enum class Op : std::uint8_t {
    kConstant,
    kParameter,
    kMatmul,
    kDense,
    kAddBias,
    kAdd,
    kSub,
    kMul,
    kScale,
    kRelu,
    kTanh,
    kSquare,
    kHuber,
    kMinimum,
    kConcatCols,
    kRescaleRows,
    kSum,
    kMean,
  };

  struct Node {
    Op op = Op::kConstant;
    std::size_t lhs = 0;
    std::size_t rhs = 0;
    std::size_t third = 0;
    double scalar = 0.0;
    bool requires_grad = false;
    Tensor own;
    Tensor* param = nullptr;
    const Tensor* view = nullptr;
    Buffer grad;
    Buffer aux;
  };

  const Tensor& node_value(std::size_t id) const;
  Var push(Node node);
  Var unary(Op op, Var a, Tensor out, double scalar = 0.0);
  Var binary(Op op, Var a, Var b, Tensor out);
  Buffer& grad_buffer(std::size_t id);
  void backprop_node(std::size_t id);

  std::vector<Node> nodes_;
};

}  // namespace ed2::numcore
