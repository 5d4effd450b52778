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

#include "ed2/numcore/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ed2::numcore {

namespace {

double huber_term(double e, double delta) {
  const double a = std::abs(e);
  return a <= delta ? 0.5 * a * a : delta * (a - 0.5 * delta);
}

}  // namespace

double mse_loss(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mse_loss");
  if (pred.size() == 0) throw ShapeError("mse_loss: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    s += e * e;
  }
  return s / static_cast<double>(pred.size());
}

double huber_loss(const Tensor& pred, const Tensor& target, double delta) {
  require_same_shape(pred, target, "huber_loss");
  if (!(delta > 0.0)) throw std::invalid_argument("huber_loss: delta must be positive");
  if (pred.size() == 0) throw ShapeError("huber_loss: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += huber_term(pred[i] - target[i], delta);
  return s / static_cast<double>(pred.size());
}

Var mse_loss(Graph& graph, Var pred, Var target) { return graph.mean(graph.square(graph.sub(pred, target))); }

Var huber_loss(Graph& graph, Var pred, Var target, double delta) {
  return graph.mean(graph.huber(graph.sub(pred, target), delta));
}

Var weighted_regression_loss(Graph& graph, Var pred, Var target, const Tensor& weights,
                             std::optional<double> huber_delta, std::optional<double> denominator) {
  Var diff = graph.sub(pred, target);
  Var penalty = huber_delta ? graph.huber(diff, *huber_delta) : graph.square(diff);
  if (weights.size() != graph.value(penalty).size()) {
    throw ShapeError("weighted_regression_loss: " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(graph.value(penalty).size()) + " elements");
  }
  Var w = graph.constant(Tensor(graph.value(penalty).shape(), std::vector<double>(weights.values().begin(),
                                                                                    weights.values().end())));
  const double denom = denominator.value_or(static_cast<double>(weights.size()));
  return graph.scale(graph.sum(graph.mul(penalty, w)), 1.0 / denom);
}

}  // namespace ed2::numcore
