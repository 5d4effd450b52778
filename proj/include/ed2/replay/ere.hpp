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

namespace ed2::replay {

/// Smallest ERE window: the batch size, or 5000 scaled to the buffer capacity
/// (5000 at a capacity of one million), whichever is larger.
std::size_t ere_min_window(std::size_t batch_size, std::size_t capacity);

/// Window c_b for update b of B in a burst: round(size * eta^(b*1000/B)),
/// clamped to [c_min, size]. When the buffer is smaller than c_min the whole
/// buffer is used.
std::size_t ere_window(std::size_t size, double eta, std::size_t b, std::size_t updates, std::size_t c_min);

/// eta0 * ratio + 1 - ratio with the ratio clamped to [0, 1].
double ere_eta_from_ratio(double eta0, double ratio);

/// Adaptive eta driven by two EWMAs of episode returns.
struct EreState {
  double eta0 = 0.995;
  double eta = 0.995;
  double r_recent = 0.0;
  double r_prev = 0.0;
  /// Largest improvement seen so far; non-positive until the first gain.
  double i_max = 0.0;
  double lambda_prev = 0.0;
  double lambda_recent = 0.0;
  std::size_t episodes = 0;

  explicit EreState(double eta0_ = 0.995);
  double improvement() const { return r_recent - r_prev; }
};

/// Folds one finished episode into the trackers and recomputes eta.
/// `episode_length` is T and `capacity` is the buffer size |D|; the slow
/// tracker uses lambda = T / floor(|D| / 2) and the fast one ten times that,
/// both capped at 1. The first episode seeds both trackers.
void ere_eta_update(EreState& state, double episode_return, std::size_t episode_length, std::size_t capacity);

}  // namespace ed2::replay
