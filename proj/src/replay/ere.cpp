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

#include "ed2/replay/ere.hpp"

#include <algorithm>
#include <cmath>

namespace ed2::replay {

std::size_t ere_min_window(std::size_t batch_size, std::size_t capacity) {
  const auto scaled = static_cast<std::size_t>(std::llround(5000.0 * static_cast<double>(capacity) / 1e6));
  return std::max(batch_size, scaled);
}

std::size_t ere_window(std::size_t size, double eta, std::size_t b, std::size_t updates, std::size_t c_min) {
  if (size == 0) return 0;
  const double exponent = static_cast<double>(b) * 1000.0 / static_cast<double>(std::max<std::size_t>(updates, 1));
  const double raw = static_cast<double>(size) * std::pow(eta, exponent);
  auto c = static_cast<std::size_t>(std::llround(raw));
  c = std::max(c, c_min);
  return std::min(c, size);
}

double ere_eta_from_ratio(double eta0, double ratio) {
  const double r = std::clamp(ratio, 0.0, 1.0);
  // Same as eta0 * r + 1 - r, but exact at r = 1.
  return 1.0 - r * (1.0 - eta0);
}

EreState::EreState(double eta0_) : eta0(eta0_), eta(eta0_) {}

void ere_eta_update(EreState& state, double episode_return, std::size_t episode_length, std::size_t capacity) {
  const double half = std::floor(static_cast<double>(capacity) / 2.0);
  state.lambda_prev = std::min(1.0, static_cast<double>(episode_length) / std::max(half, 1.0));
  state.lambda_recent = std::min(1.0, 10.0 * state.lambda_prev);

  if (state.episodes == 0) {
    state.r_recent = episode_return;
    state.r_prev = episode_return;
  } else {
    state.r_recent += state.lambda_recent * (episode_return - state.r_recent);
    state.r_prev += state.lambda_prev * (episode_return - state.r_prev);
  }
  ++state.episodes;

  const double i_recent = state.improvement();
  state.i_max = std::max(state.i_max, i_recent);
  // Cold start: no positive improvement yet, so there is nothing to compare to.
  state.eta = state.i_max > 0.0 ? ere_eta_from_ratio(state.eta0, i_recent / state.i_max) : state.eta0;
}

}  // namespace ed2::replay
