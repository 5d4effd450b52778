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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ed2/numcore/graph.hpp"
#include "ed2/numcore/tensor.hpp"

namespace ed2::numcore {

using Rng = std::mt19937_64;

/// Fully connected layer, y = x W + b with W of shape [in, out].
struct DenseLayer {
  Tensor weight;
  Tensor bias;
};

/// Multi-layer perceptron: ReLU on every hidden layer, linear output.
/// Actors apply their tanh scaling outside the network.
struct MlpParams {
  std::vector<DenseLayer> layers;

  /// widths = {in, hidden..., out}. Weights and biases are drawn uniformly
  /// from +-1/sqrt(fan_in).
  static MlpParams create(std::span<const std::size_t> widths, Rng& rng);
  static MlpParams create(std::initializer_list<std::size_t> widths, Rng& rng);

  std::size_t input_width() const;
  std::size_t output_width() const;
  std::size_t parameter_count() const;

  /// Weight and bias tensors in layer order.
  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;

  void zero_grad();
};

/// How a network's parameters enter a Graph.
enum class ParamMode {
  /// Gradients accumulate into the parameter tensors.
  kTrack,
  /// Parameters are frozen; gradients still flow to the input.
  kFrozen,
};

/// Untracked forward pass over a [batch, in] (or rank-1 [in]) input.
Tensor mlp_forward(const MlpParams& params, const Tensor& input);

/// Recorded forward pass.
Var mlp_forward(Graph& graph, MlpParams& params, Var input, ParamMode mode = ParamMode::kTrack);

/// Elementwise target <- rho * target + (1 - rho) * main.
void polyak_update(Tensor& target, const Tensor& main, double rho);
void polyak_update(MlpParams& target, const MlpParams& main, double rho);

}  // namespace ed2::numcore
