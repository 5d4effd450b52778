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

#include "ed2/agent/action.hpp"

#include <cmath>

namespace ed2::agent {

std::vector<double> normalize_action(std::span<const double> mu) {
  std::vector<double> out(mu.begin(), mu.end());
  if (out.empty()) return out;
  double g = 0.0;
  for (double v : out) g += std::abs(v);
  g /= static_cast<double>(out.size());
  if (g > 1.0) {
    for (double& v : out) v /= g;
  }
  return out;
}

std::vector<double> squash_action(std::span<const double> mu, double max_action, bool normalize) {
  std::vector<double> out = normalize ? normalize_action(mu) : std::vector<double>(mu.begin(), mu.end());
  for (double& v : out) v = max_action * std::tanh(v);
  return out;
}

std::size_t argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

std::vector<double> ucb_scores(std::span<const double> means, std::span<const double> stds, double lambda) {
  std::vector<double> out(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) out[i] = means[i] + lambda * stds[i];
  return out;
}

double backup_weight(double std, double eps, double temperature) {
  const double z = -std * temperature;
  const double sig = 1.0 / (1.0 + std::exp(-z));
  return eps + (1.0 - eps) * sig;
}

MeanStd mean_std(std::span<const double> xs) {
  MeanStd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return r;
}

}  // namespace ed2::agent
