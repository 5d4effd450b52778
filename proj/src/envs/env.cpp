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

#include "ed2/envs/env.hpp"

#include <algorithm>
#include <cmath>

namespace ed2::envs {

void EnvSpec::validate() const {
  if (!(max_action > 0.0)) throw EnvError("env spec: max_action must be positive");
  if (episode_length < 1) throw EnvError("env spec: episode_length must be at least 1");
  if (state_dim < 1 || action_dim < 1) throw EnvError("env spec: dimensions must be at least 1");
  if (!(init_noise_scale >= 0.0)) throw EnvError("env spec: init_noise_scale must be non-negative");
}

std::vector<double> clamp_action(std::span<const double> action, double max_action) {
  std::vector<double> out(action.begin(), action.end());
  for (double& a : out) {
    if (std::isnan(a)) throw EnvError("env step: NaN in action");
    a = std::clamp(a, -max_action, max_action);
  }
  return out;
}

SimulatedEnv::SimulatedEnv(EnvSpec spec) : spec_(spec) { spec_.validate(); }

std::vector<double> SimulatedEnv::reset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  state_ = nominal_state();
  const auto widths = reset_half_widths();
  for (std::size_t i = 0; i < state_.size(); ++i) {
    const double w = widths[i] * spec_.init_noise_scale;
    std::uniform_real_distribution<double> noise(-w, w);
    if (w > 0.0) state_[i] += noise(rng);
  }
  elapsed_ = 0;
  return observe();
}

StepResult SimulatedEnv::step(std::span<const double> action) {
  if (action.size() != spec_.action_dim) {
    throw EnvError("env step: expected " + std::to_string(spec_.action_dim) + " action components, got " +
                   std::to_string(action.size()));
  }
  const auto clamped = clamp_action(action, spec_.max_action);
  StepResult r = advance(clamped);
  ++elapsed_;
  r.truncated = !r.done && elapsed_ >= spec_.episode_length;
  return r;
}

}  // namespace ed2::envs
