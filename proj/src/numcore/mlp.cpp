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

#include "ed2/numcore/mlp.hpp"

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ed2::numcore {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_input_width(const MlpParams& params, std::size_t width) {
  if (params.layers.empty()) throw std::invalid_argument("mlp_forward: network has no layers");
  if (width != params.input_width()) {
    throw ShapeError("mlp_forward: input width " + std::to_string(width) + " does not match network input width " +
                     std::to_string(params.input_width()));
  }
}

}  // namespace

MlpParams MlpParams::create(std::span<const std::size_t> widths, Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("MlpParams::create: need at least input and output widths");
  MlpParams p;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t in = widths[l];
    const std::size_t out = widths[l + 1];
    if (in == 0 || out == 0) throw std::invalid_argument("MlpParams::create: zero layer width");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer layer{Tensor({in, out}), Tensor({out})};
    for (double& w : layer.weight.values()) w = dist(rng);
    for (double& b : layer.bias.values()) b = dist(rng);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

MlpParams MlpParams::create(std::initializer_list<std::size_t> widths, Rng& rng) {
  return create(std::span<const std::size_t>(widths.begin(), widths.size()), rng);
}

std::size_t MlpParams::input_width() const { return layers.empty() ? 0 : layers.front().weight.rows(); }

std::size_t MlpParams::output_width() const { return layers.empty() ? 0 : layers.back().weight.cols(); }

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

std::vector<Tensor*> MlpParams::tensors() {
  std::vector<Tensor*> out;
  out.reserve(layers.size() * 2);
  for (auto& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Tensor*> MlpParams::tensors() const {
  std::vector<const Tensor*> out;
  out.reserve(layers.size() * 2);
  for (const auto& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

void MlpParams::zero_grad() {
  for (Tensor* t : tensors()) {
    t->enable_grad();
    t->zero_grad();
  }
}

Tensor mlp_forward(const MlpParams& params, const Tensor& input) {
  check_input_width(params, input.cols());
  const bool vector_input = input.rank() == 1;
  const auto batch = static_cast<Eigen::Index>(vector_input ? 1 : input.rows());
  RowMatrix act = Eigen::Map<const RowMatrix>(input.data(), batch, static_cast<Eigen::Index>(input.cols()));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    Eigen::Map<const RowMatrix> w(layer.weight.data(), static_cast<Eigen::Index>(layer.weight.rows()),
                                  static_cast<Eigen::Index>(layer.weight.cols()));
    Eigen::Map<const Eigen::RowVectorXd> b(layer.bias.data(), static_cast<Eigen::Index>(layer.bias.size()));
    RowMatrix next = act * w;
    next.rowwise() += b;
    if (l + 1 < params.layers.size()) next = next.cwiseMax(0.0);
    act = std::move(next);
  }
  std::vector<double> values(act.data(), act.data() + act.size());
  if (vector_input) return Tensor({params.output_width()}, std::move(values));
  return Tensor({input.rows(), params.output_width()}, std::move(values));
}

Var mlp_forward(Graph& graph, MlpParams& params, Var input, ParamMode mode) {
  check_input_width(params, graph.value(input).cols());
  Var act = input;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& layer = params.layers[l];
    Var w = mode == ParamMode::kTrack ? graph.parameter(layer.weight) : graph.constant_view(layer.weight);
    Var b = mode == ParamMode::kTrack ? graph.parameter(layer.bias) : graph.constant_view(layer.bias);
    act = graph.dense(act, w, b, l + 1 < params.layers.size());
  }
  return act;
}

void polyak_update(Tensor& target, const Tensor& main, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("polyak_update: rho must lie in [0, 1]");
  require_same_shape(target, main, "polyak_update");
  auto t = target.values();
  auto m = main.values();
  const double mix = 1.0 - rho;
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rho * t[i] + mix * m[i];
}

void polyak_update(MlpParams& target, const MlpParams& main, double rho) {
  if (target.layers.size() != main.layers.size()) throw ShapeError("polyak_update: layer counts differ");
  auto ts = target.tensors();
  auto ms = main.tensors();
  for (std::size_t i = 0; i < ts.size(); ++i) polyak_update(*ts[i], *ms[i], rho);
}

}  // namespace ed2::numcore
