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

#include <optional>

#include "ed2/numcore/graph.hpp"
#include "ed2/numcore/tensor.hpp"

namespace ed2::numcore {

inline constexpr double kDefaultHuberDelta = 1.0;

// Plain evaluations.
double mse_loss(const Tensor& pred, const Tensor& target);
double huber_loss(const Tensor& pred, const Tensor& target, double delta = kDefaultHuberDelta);

// Recorded versions. With weights, each element's penalty is multiplied by
// its weight and the sum is divided by `denominator` (defaults to the
// element count).
Var mse_loss(Graph& graph, Var pred, Var target);
Var huber_loss(Graph& graph, Var pred, Var target, double delta = kDefaultHuberDelta);
Var weighted_regression_loss(Graph& graph, Var pred, Var target, const Tensor& weights,
                             std::optional<double> huber_delta, std::optional<double> denominator = std::nullopt);

}  // namespace ed2::numcore
