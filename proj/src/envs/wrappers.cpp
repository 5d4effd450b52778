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

#include "ed2/envs/wrappers.hpp"

#include <cmath>
#include <limits>

namespace ed2::envs {

EnvWrapper::EnvWrapper(std::unique_ptr<Env> inner) : inner_(std::move(inner)) {
  if (!inner_) throw EnvError("wrapper: null inner environment");
}

// --- DelayedReward ----------------------------------------------------------------

DelayedReward::DelayedReward(std::unique_ptr<Env> inner, std::size_t period)
    : EnvWrapper(std::move(inner)), period_(period) {
  if (period_ < 1) throw EnvError("delayed reward: period must be at least 1");
}

std::vector<double> DelayedReward::reset(std::uint64_t seed) {
  steps_ = 0;
  raw_total_ = 0.0;
  released_total_ = 0.0;
  return inner_->reset(seed);
}

StepResult DelayedReward::step(std::span<const double> action) {
  StepResult r = inner_->step(action);
  ++steps_;
  raw_total_ += r.reward;
  const bool release = steps_ % period_ == 0 || r.done || r.truncated;
  if (!release) {
    r.reward = 0.0;
    r.progress_reward = 0.0;
    return r;
  }
  double out = raw_total_ - released_total_;
  for (int i = 0; i < 64; ++i) {
    const double landed = released_total_ + out;
    if (landed == raw_total_) break;
    out = std::nextafter(out, landed < raw_total_ ? std::numeric_limits<double>::infinity()
                                                  : -std::numeric_limits<double>::infinity());
  }
  released_total_ += out;
  r.reward = out;
  r.progress_reward = 0.0;
  return r;
}

std::unique_ptr<Env> DelayedReward::clone() const {
  auto copy = std::make_unique<DelayedReward>(inner_->clone(), period_);
  copy->steps_ = steps_;
  copy->raw_total_ = raw_total_;
  copy->released_total_ = released_total_;
  return copy;
}

std::unique_ptr<Env> DelayedReward::evaluation_copy() const {
  return std::make_unique<DelayedReward>(inner_->evaluation_copy(), period_);
}

// --- SparseForwardReward ------------------------------------------------------------

SparseForwardReward::SparseForwardReward(std::unique_ptr<Env> inner, double threshold)
    : EnvWrapper(std::move(inner)), threshold_(threshold) {
  if (!inner_->progress_coordinate()) {
    throw EnvError("sparse reward: environment '" + inner_->name() + "' has no progress coordinate");
  }
}

void SparseForwardReward::refresh_gate() {
  if (!open_ && *inner_->progress_coordinate() > threshold_) open_ = true;
}

std::vector<double> SparseForwardReward::reset(std::uint64_t seed) {
  auto obs = inner_->reset(seed);
  open_ = false;
  refresh_gate();
  return obs;
}

void SparseForwardReward::set_internal_state(std::span<const double> state) {
  inner_->set_internal_state(state);
  refresh_gate();
}

StepResult SparseForwardReward::step(std::span<const double> action) {
  StepResult r = inner_->step(action);
  refresh_gate();
  if (!open_ && r.progress_reward > 0.0) {
    r.reward -= r.progress_reward;
    r.progress_reward = 0.0;
  }
  r.success = r.success || open_;
  return r;
}

std::unique_ptr<Env> SparseForwardReward::clone() const {
  auto copy = std::make_unique<SparseForwardReward>(inner_->clone(), threshold_);
  copy->open_ = open_;
  return copy;
}

std::unique_ptr<Env> SparseForwardReward::evaluation_copy() const {
  return std::make_unique<SparseForwardReward>(inner_->evaluation_copy(), threshold_);
}

// --- ObservationNormalizer ----------------------------------------------------------

ObservationNormalizer::ObservationNormalizer(std::unique_ptr<Env> inner, std::shared_ptr<RunningNormalizer> stats,
                                             bool frozen)
    : EnvWrapper(std::move(inner)), stats_(std::move(stats)), frozen_(frozen) {
  if (!stats_ || stats_->dim() != inner_->spec().state_dim) {
    throw EnvError("observation normalizer: statistics do not match the state dimension");
  }
}

ObservationNormalizer::ObservationNormalizer(std::unique_ptr<Env> inner)
    : EnvWrapper(std::move(inner)),
      stats_(std::make_shared<RunningNormalizer>(inner_->spec().state_dim)),
      frozen_(false) {}

std::vector<double> ObservationNormalizer::process(const std::vector<double>& obs) {
  if (!frozen_) stats_->update(obs);
  return stats_->apply(obs);
}

std::vector<double> ObservationNormalizer::reset(std::uint64_t seed) { return process(inner_->reset(seed)); }

StepResult ObservationNormalizer::step(std::span<const double> action) {
  StepResult r = inner_->step(action);
  r.next_state = process(r.next_state);
  return r;
}

std::vector<double> ObservationNormalizer::observe() const { return stats_->apply(inner_->observe()); }

std::unique_ptr<Env> ObservationNormalizer::clone() const {
  return std::make_unique<ObservationNormalizer>(inner_->clone(), stats_, frozen_);
}

std::unique_ptr<Env> ObservationNormalizer::evaluation_copy() const {
  return std::make_unique<ObservationNormalizer>(inner_->evaluation_copy(), stats_, true);
}

// --- RewardNormalizer ---------------------------------------------------------------

RewardNormalizer::RewardNormalizer(std::unique_ptr<Env> inner, std::shared_ptr<RunningNormalizer> stats)
    : EnvWrapper(std::move(inner)), stats_(std::move(stats)) {
  if (!stats_ || stats_->dim() != 1) throw EnvError("reward normalizer: statistics must be one-dimensional");
}

RewardNormalizer::RewardNormalizer(std::unique_ptr<Env> inner)
    : RewardNormalizer(std::move(inner), std::make_shared<RunningNormalizer>(1)) {}

StepResult RewardNormalizer::step(std::span<const double> action) {
  StepResult r = inner_->step(action);
  const double raw[1] = {r.reward};
  stats_->update(raw);
  const double scaled = stats_->apply(raw)[0];
  r.reward = scaled;
  r.progress_reward = 0.0;
  return r;
}

std::unique_ptr<Env> RewardNormalizer::clone() const {
  return std::make_unique<RewardNormalizer>(inner_->clone(), stats_);
}

std::unique_ptr<Env> wrap_delayed(std::unique_ptr<Env> env, std::size_t period) {
  return std::make_unique<DelayedReward>(std::move(env), period);
}

std::unique_ptr<Env> wrap_sparse(std::unique_ptr<Env> env, double threshold) {
  return std::make_unique<SparseForwardReward>(std::move(env), threshold);
}

}  // namespace ed2::envs
