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

#include <memory>
#include <string>
#include <vector>

#include "ed2/envs/env.hpp"
#include "ed2/envs/normalizer.hpp"

namespace ed2::envs {

/// Forwards everything to an inner environment.
class EnvWrapper : public Env {
 public:
  explicit EnvWrapper(std::unique_ptr<Env> inner);

  const EnvSpec& spec() const override { return inner_->spec(); }
  std::string name() const override { return inner_->name(); }
  std::vector<double> reset(std::uint64_t seed) override { return inner_->reset(seed); }
  StepResult step(std::span<const double> action) override { return inner_->step(action); }
  std::optional<double> progress_coordinate() const override { return inner_->progress_coordinate(); }
  std::vector<double> internal_state() const override { return inner_->internal_state(); }
  void set_internal_state(std::span<const double> state) override { inner_->set_internal_state(state); }
  std::vector<double> observe() const override { return inner_->observe(); }

  const Env& inner() const { return *inner_; }

 protected:
  std::unique_ptr<Env> inner_;
};

/// Withholds reward and releases the accumulated sum every `period` steps,
/// and on episode end (terminal or truncation).
///
/// Each release is the raw running total minus what has already been
/// released, nudged by ulps if needed, so summing the emitted rewards left to
/// right reproduces the left-to-right raw episode sum exactly.
class DelayedReward final : public EnvWrapper {
 public:
  DelayedReward(std::unique_ptr<Env> inner, std::size_t period = 10);

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::unique_ptr<Env> clone() const override;
  std::unique_ptr<Env> evaluation_copy() const override;

  std::size_t period() const { return period_; }

 private:
  std::size_t period_;
  std::size_t steps_ = 0;
  double raw_total_ = 0.0;
  double released_total_ = 0.0;
};

/// Gates the forward-motion reward until the agent's progress coordinate
/// exceeds `threshold`; the gate then stays open for the rest of the episode.
/// While closed only the positive part of the forward reward is withheld,
/// so no step ever pays more than the unwrapped task. Steps taken with the
/// gate open report success.
class SparseForwardReward final : public EnvWrapper {
 public:
  SparseForwardReward(std::unique_ptr<Env> inner, double threshold = 1.0);

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  void set_internal_state(std::span<const double> state) override;
  std::unique_ptr<Env> clone() const override;
  std::unique_ptr<Env> evaluation_copy() const override;

  bool gate_open() const { return open_; }
  double threshold() const { return threshold_; }

 private:
  void refresh_gate();

  double threshold_;
  bool open_ = false;
};

/// Normalizes observations with running statistics. Frozen copies read the
/// shared statistics without updating them.
class ObservationNormalizer final : public EnvWrapper {
 public:
  ObservationNormalizer(std::unique_ptr<Env> inner, std::shared_ptr<RunningNormalizer> stats, bool frozen = false);
  explicit ObservationNormalizer(std::unique_ptr<Env> inner);

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::vector<double> observe() const override;
  std::unique_ptr<Env> clone() const override;
  std::unique_ptr<Env> evaluation_copy() const override;

  const RunningNormalizer& stats() const { return *stats_; }
  bool frozen() const { return frozen_; }

 private:
  std::vector<double> process(const std::vector<double>& obs);

  std::shared_ptr<RunningNormalizer> stats_;
  bool frozen_;
};

/// Normalizes rewards with running statistics. Dropped from evaluation
/// copies. The reward loses its forward/other split, so it must be the
/// outermost reward-shaping wrapper.
class RewardNormalizer final : public EnvWrapper {
 public:
  RewardNormalizer(std::unique_ptr<Env> inner, std::shared_ptr<RunningNormalizer> stats);
  explicit RewardNormalizer(std::unique_ptr<Env> inner);

  StepResult step(std::span<const double> action) override;
  std::unique_ptr<Env> clone() const override;
  std::unique_ptr<Env> evaluation_copy() const override { return inner_->evaluation_copy(); }

  const RunningNormalizer& stats() const { return *stats_; }

 private:
  std::shared_ptr<RunningNormalizer> stats_;
};

std::unique_ptr<Env> wrap_delayed(std::unique_ptr<Env> env, std::size_t period = 10);
std::unique_ptr<Env> wrap_sparse(std::unique_ptr<Env> env, double threshold = 1.0);

}  // namespace ed2::envs
