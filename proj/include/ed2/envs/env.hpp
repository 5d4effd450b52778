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

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ed2::envs {

/// Thrown for invalid actions (NaN) or unsupported wrapper combinations.
class EnvError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EnvSpec {
  std::size_t state_dim = 1;
  std::size_t action_dim = 1;
  /// Actions are clamped componentwise to [-max_action, max_action].
  double max_action = 1.0;
  std::size_t episode_length = 1;
  /// Multiplies each environment's per-coordinate reset perturbation.
  double init_noise_scale = 1.0;

  void validate() const;
};

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  /// Terminal signal d: the next state is absorbing.
  bool done = false;
  /// Time-limit cut; not terminal for bootstrapping.
  bool truncated = false;
  /// Forward-motion share of `reward` (zero for envs without one).
  double progress_reward = 0.0;
  /// Task-specific goal indicator (rings: innermost circle reached).
  bool success = false;
};

/// Markov decision process with a stochastic reset and deterministic steps.
class Env {
 public:
  virtual ~Env() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual std::string name() const = 0;

  /// Starts an episode. The same seed always yields the same initial state.
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;

  virtual std::unique_ptr<Env> clone() const = 0;
  /// A copy suitable for test episodes: shares any learned normalization
  /// statistics without updating them and drops reward rescaling, so
  /// returns stay in task units.
  virtual std::unique_ptr<Env> evaluation_copy() const { return clone(); }

  /// Position along the task's forward axis, for tasks that reward progress.
  virtual std::optional<double> progress_coordinate() const { return std::nullopt; }

  /// Raw simulator state (not the observation). Used by tests and scripted
  /// rollouts.
  virtual std::vector<double> internal_state() const = 0;
  virtual void set_internal_state(std::span<const double> state) = 0;
  virtual std::vector<double> observe() const = 0;
};

/// Shared bookkeeping for the built-in simulators: clamping, NaN checks,
/// step counting and time-limit truncation.
class SimulatedEnv : public Env {
 public:
  explicit SimulatedEnv(EnvSpec spec);

  const EnvSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::uint64_t seed) final;
  StepResult step(std::span<const double> action) final;

  std::size_t elapsed_steps() const { return elapsed_; }

 protected:
  /// Nominal initial internal state and per-coordinate uniform half-widths.
  virtual std::vector<double> nominal_state() const = 0;
  virtual std::vector<double> reset_half_widths() const = 0;
  /// Advances one dt with an already clamped action. Fills everything but
  /// `truncated`.
  virtual StepResult advance(std::span<const double> action) = 0;

  EnvSpec spec_;
  std::vector<double> state_;

 private:
  std::size_t elapsed_ = 0;
};

std::vector<double> clamp_action(std::span<const double> action, double max_action);

}  // namespace ed2::envs
