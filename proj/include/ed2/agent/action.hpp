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
#include <span>
#include <vector>

namespace ed2::agent {

/// Divides mu by G = mean |mu_i| when G > 1; otherwise returns mu unchanged.
std::vector<double> normalize_action(std::span<const double> mu);

/// M * tanh(normalize(mu)), or M * tanh(mu) with normalization off.
std::vector<double> squash_action(std::span<const double> mu, double max_action, bool normalize = true);

/// Q = f + beta * f_prior.
inline double prior_q(double trainable_out, double prior_out, double beta) { return trainable_out + beta * prior_out; }

/// Index of the largest score; ties go to the lowest index.
std::size_t argmax_lowest(std::span<const double> scores);

/// mean_k + lambda * std_k for each candidate.
std::vector<double> ucb_scores(std::span<const double> means, std::span<const double> stds, double lambda);

/// w = eps + (1 - eps) * sigmoid(-std * temperature).
double backup_weight(double std, double eps, double temperature);

/// r + gamma (1 - d) min(q1, q2), or r + gamma (1 - d) q1 when unclipped.
inline double bellman_target(double r, double gamma, bool done, double q1, double q2, bool clipped) {
  if (done) return r;
  const double q = clipped ? (q2 < q1 ? q2 : q1) : q1;
  return r + gamma * q;
}

/// Mean and population standard deviation.
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};
MeanStd mean_std(std::span<const double> xs);

}  // namespace ed2::agent
