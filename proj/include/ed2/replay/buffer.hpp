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
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ed2/numcore/tensor.hpp"

namespace ed2::replay {

class ReplayError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Rng = std::mt19937_64;

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

/// A sampled minibatch laid out as row-major matrices, one row per sample.
struct Batch {
  numcore::Tensor states;       // [n, state_dim]
  numcore::Tensor actions;      // [n, action_dim]
  numcore::Tensor rewards;      // [n]
  numcore::Tensor next_states;  // [n, state_dim]
  numcore::Tensor dones;        // [n], 1.0 for terminal
  /// [n, members] of 0/1 when bootstrap masks are on, empty otherwise.
  numcore::Tensor masks;
  /// Insertion ordinal of each sample (0 = first transition ever stored).
  std::vector<std::uint64_t> ids;

  std::size_t size() const { return ids.size(); }
};

struct BootstrapMasks {
  std::size_t members = 0;  // 0 disables masks
  double probability = 0.5;
  std::uint64_t seed = 0;
};

/// Fixed-capacity FIFO of transitions with flat ring storage.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim, BootstrapMasks masks = {});

  /// Rejects transitions with wrong widths or non-finite fields.
  void store(const Transition& t);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::uint64_t inserted() const { return inserted_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  bool has_masks() const { return masks_.members > 0; }
  std::size_t mask_members() const { return masks_.members; }

  /// Transition stored `age` insertions ago (0 = newest).
  Transition recent(std::size_t age) const;
  /// Mask row of the transition stored `age` insertions ago.
  std::vector<bool> recent_mask(std::size_t age) const;

  /// Uniform with replacement over the newest min(window, size) transitions.
  Batch sample_recent(std::size_t window, std::size_t batch_size, Rng& rng) const;
  Batch sample_uniform(std::size_t batch_size, Rng& rng) const { return sample_recent(size_, batch_size, rng); }

 private:
  std::size_t slot_of_age(std::size_t age) const;

  std::size_t capacity_;
  std::size_t state_dim_;
  std::size_t action_dim_;
  BootstrapMasks masks_;
  Rng mask_rng_;

  std::vector<double> states_;
  std::vector<double> actions_;
  std::vector<double> rewards_;
  std::vector<double> next_states_;
  std::vector<std::uint8_t> dones_;
  std::vector<std::uint8_t> mask_bits_;

  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::uint64_t inserted_ = 0;
};

}  // namespace ed2::replay
