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

#include "ed2/replay/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ed2::replay {

namespace {

bool finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void copy_row(const std::vector<double>& src, std::size_t slot, std::size_t width, double* dst) {
  const double* from = src.data() + slot * width;
  for (std::size_t j = 0; j < width; ++j) dst[j] = from[j];
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim, BootstrapMasks masks)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim), masks_(masks), mask_rng_(masks.seed) {
  if (capacity_ == 0) throw ReplayError("replay buffer: capacity must be positive");
  if (state_dim_ == 0 || action_dim_ == 0) throw ReplayError("replay buffer: dimensions must be positive");
  if (masks_.members > 0 && !(masks_.probability >= 0.0 && masks_.probability <= 1.0)) {
    throw ReplayError("replay buffer: mask probability must lie in [0, 1]");
  }
  states_.resize(capacity_ * state_dim_);
  actions_.resize(capacity_ * action_dim_);
  rewards_.resize(capacity_);
  next_states_.resize(capacity_ * state_dim_);
  dones_.resize(capacity_);
  mask_bits_.resize(capacity_ * masks_.members);
}

void ReplayBuffer::store(const Transition& t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ || t.action.size() != action_dim_) {
    throw ReplayError("replay buffer: transition has the wrong width");
  }
  if (!finite(t.state) || !finite(t.action) || !finite(t.next_state) || !std::isfinite(t.reward)) {
    throw ReplayError("replay buffer: transition " + std::to_string(inserted_) + " has a non-finite field");
  }
  const std::size_t s = next_;
  std::copy(t.state.begin(), t.state.end(), states_.begin() + s * state_dim_);
  std::copy(t.action.begin(), t.action.end(), actions_.begin() + s * action_dim_);
  std::copy(t.next_state.begin(), t.next_state.end(), next_states_.begin() + s * state_dim_);
  rewards_[s] = t.reward;
  dones_[s] = t.done ? 1 : 0;
  if (masks_.members > 0) {
    std::bernoulli_distribution keep(masks_.probability);
    for (std::size_t k = 0; k < masks_.members; ++k) mask_bits_[s * masks_.members + k] = keep(mask_rng_) ? 1 : 0;
  }
  next_ = (next_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
  ++inserted_;
}

std::size_t ReplayBuffer::slot_of_age(std::size_t age) const {
  if (age >= size_) throw ReplayError("replay buffer: age out of range");
  return (next_ + capacity_ - 1 - age) % capacity_;
}

Transition ReplayBuffer::recent(std::size_t age) const {
  const std::size_t s = slot_of_age(age);
  Transition t;
  t.state.assign(states_.begin() + s * state_dim_, states_.begin() + (s + 1) * state_dim_);
  t.action.assign(actions_.begin() + s * action_dim_, actions_.begin() + (s + 1) * action_dim_);
  t.next_state.assign(next_states_.begin() + s * state_dim_, next_states_.begin() + (s + 1) * state_dim_);
  t.reward = rewards_[s];
  t.done = dones_[s] != 0;
  return t;
}

std::vector<bool> ReplayBuffer::recent_mask(std::size_t age) const {
  const std::size_t s = slot_of_age(age);
  std::vector<bool> out(masks_.members);
  for (std::size_t k = 0; k < masks_.members; ++k) out[k] = mask_bits_[s * masks_.members + k] != 0;
  return out;
}

Batch ReplayBuffer::sample_recent(std::size_t window, std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw ReplayError("replay buffer: cannot sample from an empty buffer");
  if (window == 0) throw ReplayError("replay buffer: sampling window must be at least 1");
  if (batch_size == 0) throw ReplayError("replay buffer: batch size must be positive");
  const std::size_t w = std::min(window, size_);
  std::uniform_int_distribution<std::size_t> pick(0, w - 1);

  Batch b;
  b.states = numcore::Tensor({batch_size, state_dim_});
  b.actions = numcore::Tensor({batch_size, action_dim_});
  b.rewards = numcore::Tensor({batch_size});
  b.next_states = numcore::Tensor({batch_size, state_dim_});
  b.dones = numcore::Tensor({batch_size});
  if (masks_.members > 0) b.masks = numcore::Tensor({batch_size, masks_.members});
  b.ids.resize(batch_size);

  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t age = pick(rng);
    const std::size_t s = slot_of_age(age);
    copy_row(states_, s, state_dim_, b.states.data() + i * state_dim_);
    copy_row(actions_, s, action_dim_, b.actions.data() + i * action_dim_);
    copy_row(next_states_, s, state_dim_, b.next_states.data() + i * state_dim_);
    b.rewards[i] = rewards_[s];
    b.dones[i] = dones_[s] ? 1.0 : 0.0;
    for (std::size_t k = 0; k < masks_.members; ++k) {
      b.masks[i * masks_.members + k] = mask_bits_[s * masks_.members + k] ? 1.0 : 0.0;
    }
    b.ids[i] = inserted_ - 1 - age;
  }
  return b;
}

}  // namespace ed2::replay
