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

#include "ed2/numcore/graph.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

namespace ed2::numcore {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;

ConstMatMap as_matrix(const Tensor& t) {
  return ConstMatMap(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

ConstMatMap as_matrix(const Buffer& buf, std::size_t rows, std::size_t cols) {
  return ConstMatMap(buf.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

MatMap as_matrix(Buffer& buf, std::size_t rows, std::size_t cols) {
  return MatMap(buf.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

void require_matrix(const Tensor& t, const char* what) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(what) + ": expected a rank-2 tensor, got " + shape_string(t.shape()));
  }
}

}  // namespace

Var Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

const Tensor& Graph::node_value(std::size_t id) const {
  const Node& n = nodes_[id];
  if (n.param) return *n.param;
  return n.view ? *n.view : n.own;
}

const Tensor& Graph::value(Var v) const { return node_value(v.id); }

std::span<const double> Graph::grad(Var v) const { return nodes_[v.id].grad; }

Buffer& Graph::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(node_value(id).size(), 0.0);
  return n.grad;
}

Var Graph::constant(Tensor value) {
  Node n;
  n.op = Op::kConstant;
  n.own = std::move(value);
  return push(std::move(n));
}

Var Graph::parameter(Tensor& param) {
  Node n;
  n.op = Op::kParameter;
  n.param = &param;
  n.requires_grad = true;
  return push(std::move(n));
}

Var Graph::constant_view(const Tensor& value) {
  Node n;
  n.op = Op::kConstant;
  n.view = &value;
  return push(std::move(n));
}

Var Graph::unary(Op op, Var a, Tensor out, double scalar) {
  Node n;
  n.op = op;
  n.lhs = a.id;
  n.scalar = scalar;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.own = std::move(out);
  return push(std::move(n));
}

Var Graph::binary(Op op, Var a, Var b, Tensor out) {
  Node n;
  n.op = op;
  n.lhs = a.id;
  n.rhs = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  n.own = std::move(out);
  return push(std::move(n));
}

Var Graph::matmul(Var x, Var w) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  require_matrix(xv, "matmul");
  require_matrix(wv, "matmul");
  if (xv.cols() != wv.rows()) {
    throw ShapeError("matmul: inner dimensions differ " + shape_string(xv.shape()) + " x " +
                     shape_string(wv.shape()));
  }
  Tensor out({xv.rows(), wv.cols()});
  MatMap(out.data(), static_cast<Eigen::Index>(out.rows()), static_cast<Eigen::Index>(out.cols())).noalias() =
      as_matrix(xv) * as_matrix(wv);
  return binary(Op::kMatmul, x, w, std::move(out));
}

Var Graph::add_bias(Var x, Var bias) {
  const Tensor& xv = value(x);
  const Tensor& bv = value(bias);
  require_matrix(xv, "add_bias");
  if (bv.size() != xv.cols()) {
    throw ShapeError("add_bias: bias " + shape_string(bv.shape()) + " does not match rows of width " +
                     std::to_string(xv.cols()));
  }
  Tensor out = xv;
  const std::size_t cols = xv.cols();
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    double* row = out.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += bv[c];
  }
  return binary(Op::kAddBias, x, bias, std::move(out));
}

Var Graph::dense(Var x, Var w, Var bias, bool relu) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(bias);
  require_matrix(xv, "dense");
  require_matrix(wv, "dense");
  if (xv.cols() != wv.rows() || bv.size() != wv.cols()) {
    throw ShapeError("dense: shapes " + shape_string(xv.shape()) + " x " + shape_string(wv.shape()) + " + " +
                     shape_string(bv.shape()) + " do not line up");
  }
  Tensor out({xv.rows(), wv.cols()});
  MatMap y(out.data(), static_cast<Eigen::Index>(out.rows()), static_cast<Eigen::Index>(out.cols()));
  y.noalias() = as_matrix(xv) * as_matrix(wv);
  y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bv.data(), static_cast<Eigen::Index>(bv.size()));
  if (relu) y = y.cwiseMax(0.0);
  Node n;
  n.op = Op::kDense;
  n.lhs = x.id;
  n.rhs = w.id;
  n.third = bias.id;
  n.scalar = relu ? 1.0 : 0.0;
  n.requires_grad = nodes_[x.id].requires_grad || nodes_[w.id].requires_grad || nodes_[bias.id].requires_grad;
  n.own = std::move(out);
  return push(std::move(n));
}

Var Graph::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  Tensor out = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return binary(Op::kAdd, a, b, std::move(out));
}

Var Graph::sub(Var a, Var b) {
  require_same_shape(value(a), value(b), "sub");
  Tensor out = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return binary(Op::kSub, a, b, std::move(out));
}

Var Graph::mul(Var a, Var b) {
  require_same_shape(value(a), value(b), "mul");
  Tensor out = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return binary(Op::kMul, a, b, std::move(out));
}

Var Graph::minimum(Var a, Var b) {
  require_same_shape(value(a), value(b), "minimum");
  Tensor out = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(out[i], bv[i]);
  return binary(Op::kMinimum, a, b, std::move(out));
}

Var Graph::scale(Var a, double s) {
  Tensor out = value(a);
  for (double& v : out.values()) v *= s;
  return unary(Op::kScale, a, std::move(out), s);
}

Var Graph::relu(Var a) {
  Tensor out = value(a);
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return unary(Op::kRelu, a, std::move(out));
}

Var Graph::tanh(Var a) {
  Tensor out = value(a);
  for (double& v : out.values()) v = std::tanh(v);
  return unary(Op::kTanh, a, std::move(out));
}

Var Graph::square(Var a) {
  Tensor out = value(a);
  for (double& v : out.values()) v *= v;
  return unary(Op::kSquare, a, std::move(out));
}

Var Graph::huber(Var a, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("huber: delta must be positive");
  Tensor out = value(a);
  for (double& v : out.values()) {
    const double e = std::abs(v);
    v = e <= delta ? 0.5 * e * e : delta * (e - 0.5 * delta);
  }
  return unary(Op::kHuber, a, std::move(out), delta);
}

Var Graph::concat_cols(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require_matrix(av, "concat_cols");
  require_matrix(bv, "concat_cols");
  if (av.rows() != bv.rows()) {
    throw ShapeError("concat_cols: row counts differ " + shape_string(av.shape()) + " vs " +
                     shape_string(bv.shape()));
  }
  const std::size_t p = av.cols();
  const std::size_t q = bv.cols();
  Tensor out({av.rows(), p + q});
  for (std::size_t r = 0; r < av.rows(); ++r) {
    std::copy_n(av.data() + r * p, p, out.data() + r * (p + q));
    std::copy_n(bv.data() + r * q, q, out.data() + r * (p + q) + p);
  }
  return binary(Op::kConcatCols, a, b, std::move(out));
}

Var Graph::rescale_rows_mean_abs(Var a) {
  const Tensor& av = value(a);
  require_matrix(av, "rescale_rows_mean_abs");
  Tensor out = av;
  const std::size_t cols = av.cols();
  Buffer g(av.rows(), 1.0);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double* row = out.data() + r * cols;
    double mag = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mag += std::abs(row[c]);
    mag /= static_cast<double>(cols);
    if (mag > 1.0) {
      g[r] = mag;
      for (std::size_t c = 0; c < cols; ++c) row[c] /= mag;
    }
  }
  Var v = unary(Op::kRescaleRows, a, std::move(out));
  nodes_[v.id].aux = std::move(g);
  return v;
}

Var Graph::sum(Var a) {
  double s = 0.0;
  for (double v : value(a).values()) s += v;
  return unary(Op::kSum, a, Tensor::scalar(s));
}

Var Graph::mean(Var a) {
  const Tensor& av = value(a);
  if (av.size() == 0) throw ShapeError("mean: empty tensor");
  double s = 0.0;
  for (double v : av.values()) s += v;
  return unary(Op::kMean, a, Tensor::scalar(s / static_cast<double>(av.size())));
}

void Graph::backward(Var loss) {
  if (value(loss).size() != 1) {
    throw ShapeError("backward: loss must be a single element, got shape " + shape_string(value(loss).shape()));
  }
  for (Node& n : nodes_) std::fill(n.grad.begin(), n.grad.end(), 0.0);
  if (!nodes_[loss.id].requires_grad) return;
  grad_buffer(loss.id)[0] = 1.0;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.op == Op::kParameter) {
      n.param->enable_grad();
      auto pg = n.param->grad();
      for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += n.grad[i];
      continue;
    }
    backprop_node(id);
  }
}

void Graph::backprop_node(std::size_t id) {
  const Op op = nodes_[id].op;
  const std::size_t lhs = nodes_[id].lhs;
  const std::size_t rhs = nodes_[id].rhs;
  const bool lhs_req = nodes_[lhs].requires_grad;
  const bool rhs_req = nodes_[rhs].requires_grad;
  const Buffer& g = nodes_[id].grad;
  const Tensor& out = nodes_[id].own;

  switch (op) {
    case Op::kConstant:
    case Op::kParameter:
      break;
    case Op::kMatmul: {
      const Tensor& x = node_value(lhs);
      const Tensor& w = node_value(rhs);
      const auto dy = as_matrix(g, out.rows(), out.cols());
      if (lhs_req) {
        as_matrix(grad_buffer(lhs), x.rows(), x.cols()).noalias() += dy * as_matrix(w).transpose();
      }
      if (rhs_req) {
        as_matrix(grad_buffer(rhs), w.rows(), w.cols()).noalias() += as_matrix(x).transpose() * dy;
      }
      break;
    }
    case Op::kDense: {
      const Tensor& x = node_value(lhs);
      const Tensor& w = node_value(rhs);
      const std::size_t third = nodes_[id].third;
      const auto cols = static_cast<Eigen::Index>(out.cols());
      RowMatrix dy = as_matrix(g, out.rows(), out.cols());
      if (nodes_[id].scalar != 0.0) dy = (as_matrix(out).array() > 0.0).select(dy, 0.0);
      if (lhs_req) {
        as_matrix(grad_buffer(lhs), x.rows(), x.cols()).noalias() += dy * as_matrix(w).transpose();
      }
      if (rhs_req) {
        as_matrix(grad_buffer(rhs), w.rows(), w.cols()).noalias() += as_matrix(x).transpose() * dy;
      }
      if (nodes_[third].requires_grad) {
        auto& gb = grad_buffer(third);
        Eigen::Map<Eigen::RowVectorXd>(gb.data(), cols) += dy.colwise().sum();
      }
      break;
    }
    case Op::kAddBias: {
      if (lhs_req) {
        auto& gx = grad_buffer(lhs);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
      }
      if (rhs_req) {
        auto& gb = grad_buffer(rhs);
        const std::size_t cols = out.cols();
        for (std::size_t r = 0; r < out.rows(); ++r)
          for (std::size_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
      }
      break;
    }
    case Op::kAdd:
    case Op::kSub: {
      const double sign = op == Op::kAdd ? 1.0 : -1.0;
      if (lhs_req) {
        auto& ga = grad_buffer(lhs);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      if (rhs_req) {
        auto& gb = grad_buffer(rhs);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += sign * g[i];
      }
      break;
    }
    case Op::kMul: {
      const Tensor& a = node_value(lhs);
      const Tensor& b = node_value(rhs);
      if (lhs_req) {
        auto& ga = grad_buffer(lhs);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
      }
      if (rhs_req) {
        auto& gb = grad_buffer(rhs);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
      }
      break;
    }
    case Op::kMinimum: {
      // Ties route the gradient to the left operand.
      const Tensor& a = node_value(lhs);
      const Tensor& b = node_value(rhs);
      if (lhs_req) {
        auto& ga = grad_buffer(lhs);
        for (std::size_t i = 0; i < g.size(); ++i)
          if (a[i] <= b[i]) ga[i] += g[i];
      }
      if (rhs_req) {
        auto& gb = grad_buffer(rhs);
        for (std::size_t i = 0; i < g.size(); ++i)
          if (a[i] > b[i]) gb[i] += g[i];
      }
      break;
    }
    case Op::kScale: {
      const double s = nodes_[id].scalar;
      auto& ga = grad_buffer(lhs);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
      break;
    }
    case Op::kRelu: {
      auto& ga = grad_buffer(lhs);
      for (std::size_t i = 0; i < g.size(); ++i)
        if (out[i] > 0.0) ga[i] += g[i];
      break;
    }
    case Op::kTanh: {
      auto& ga = grad_buffer(lhs);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - out[i] * out[i]);
      break;
    }
    case Op::kSquare: {
      const Tensor& a = node_value(lhs);
      auto& ga = grad_buffer(lhs);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += 2.0 * a[i] * g[i];
      break;
    }
    case Op::kHuber: {
      const Tensor& a = node_value(lhs);
      const double delta = nodes_[id].scalar;
      auto& ga = grad_buffer(lhs);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double e = a[i];
        const double d = std::abs(e) <= delta ? e : (e > 0.0 ? delta : -delta);
        ga[i] += d * g[i];
      }
      break;
    }
    case Op::kConcatCols: {
      const std::size_t p = node_value(lhs).cols();
      const std::size_t q = node_value(rhs).cols();
      const std::size_t rows = out.rows();
      if (lhs_req) {
        auto& ga = grad_buffer(lhs);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < p; ++c) ga[r * p + c] += g[r * (p + q) + c];
      }
      if (rhs_req) {
        auto& gb = grad_buffer(rhs);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < q; ++c) gb[r * q + c] += g[r * (p + q) + p + c];
      }
      break;
    }
    case Op::kRescaleRows: {
      // y_i = x_i / G with G = mean_j |x_j| (only when G > 1):
      // dL/dx_j = g_j / G - sign(x_j) / (A G^2) * sum_i g_i x_i
      const Tensor& x = node_value(lhs);
      const Buffer& scale = nodes_[id].aux;
      const std::size_t cols = x.cols();
      const double inv_a = 1.0 / static_cast<double>(cols);
      auto& ga = grad_buffer(lhs);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        const double gr = scale[r];
        const double* xr = x.data() + r * cols;
        const double* gy = g.data() + r * cols;
        double* gx = ga.data() + r * cols;
        if (gr == 1.0) {
          for (std::size_t c = 0; c < cols; ++c) gx[c] += gy[c];
          continue;
        }
        double dot = 0.0;
        for (std::size_t c = 0; c < cols; ++c) dot += gy[c] * xr[c];
        const double k = dot * inv_a / (gr * gr);
        for (std::size_t c = 0; c < cols; ++c) {
          const double sgn = xr[c] > 0.0 ? 1.0 : (xr[c] < 0.0 ? -1.0 : 0.0);
          gx[c] += gy[c] / gr - sgn * k;
        }
      }
      break;
    }
    case Op::kSum: {
      auto& ga = grad_buffer(lhs);
      for (double& v : ga) v += g[0];
      break;
    }
    case Op::kMean: {
      auto& ga = grad_buffer(lhs);
      const double s = g[0] / static_cast<double>(ga.size());
      for (double& v : ga) v += s;
      break;
    }
  }
}

}  // namespace ed2::numcore
