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

#include <array>
#include <vector>

#include "ed2/envs/env.hpp"

namespace ed2::envs {

/// Torque-limited pendulum swing-up. Internal state (theta, omega) with
/// theta = 0 upright; observation (cos theta, sin theta, omega).
struct PendulumOptions {
  double gravity = 10.0;
  double mass = 1.0;
  double length = 1.0;
  double dt = 0.05;
  double max_speed = 8.0;
  double max_torque = 2.0;
  std::size_t episode_length = 200;
  double init_noise_scale = 1.0;
};

class Pendulum final : public SimulatedEnv {
 public:
  explicit Pendulum(PendulumOptions options = {});

  std::string name() const override { return "pendulum"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<Pendulum>(*this); }
  std::vector<double> internal_state() const override { return state_; }
  void set_internal_state(std::span<const double> state) override;
  std::vector<double> observe() const override;

  static double angle_normalize(double theta);

 protected:
  std::vector<double> nominal_state() const override;
  std::vector<double> reset_half_widths() const override;
  StepResult advance(std::span<const double> action) override;

 private:
  PendulumOptions options_;
};

/// Planar point mass with linear drag. Internal state and observation are
/// (x, y, vx, vy); force u in R^2. Explicit Euler, so position advances by
/// the pre-step velocity times dt.
struct PointMassOptions {
  double dt = 0.05;
  double drag = 1.0;
  double max_force = 1.0;
  double control_cost = 1e-3;
  std::size_t episode_length = 300;
  double init_noise_scale = 1.0;
  /// Uniform reset half-widths for position and velocity.
  double position_noise = 0.1;
  double velocity_noise = 0.1;
};

/// Runner task: reward = forward velocity vx - control_cost * |u|^2.
class PointMassRunner final : public SimulatedEnv {
 public:
  explicit PointMassRunner(PointMassOptions options = {});

  std::string name() const override { return "pointmass"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<PointMassRunner>(*this); }
  std::optional<double> progress_coordinate() const override { return state_.at(0); }
  std::vector<double> internal_state() const override { return state_; }
  void set_internal_state(std::span<const double> state) override;
  std::vector<double> observe() const override { return state_; }

 protected:
  std::vector<double> nominal_state() const override;
  std::vector<double> reset_half_widths() const override;
  StepResult advance(std::span<const double> action) override;

 private:
  PointMassOptions options_;
};

/// Concentric target circles sharing one center, listed outermost first.
struct CircleStack {
  std::array<double, 2> center{0.0, 0.0};
  std::vector<double> radii;
};

struct RingsOptions {
  PointMassOptions body;
  std::vector<CircleStack> stacks;

  /// Two stacks of radii {3, 2, 1}, centered at (4, 0) and (-4, 0).
  static RingsOptions defaults();
};

/// Exploration task: the per-step reward counts the circles containing the
/// agent. Reaching any innermost circle marks success; episodes run to the
/// time limit.
class Rings final : public SimulatedEnv {
 public:
  explicit Rings(RingsOptions options = RingsOptions::defaults());

  std::string name() const override { return "rings"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<Rings>(*this); }
  std::vector<double> internal_state() const override { return state_; }
  void set_internal_state(std::span<const double> state) override;
  std::vector<double> observe() const override { return state_; }

  /// Number of circles (over all stacks) containing (x, y); boundary counts
  /// as inside.
  std::size_t circles_containing(double x, double y) const;
  bool in_innermost(double x, double y) const;

 protected:
  std::vector<double> nominal_state() const override;
  std::vector<double> reset_half_widths() const override;
  StepResult advance(std::span<const double> action) override;

 private:
  RingsOptions options_;
};

}  // namespace ed2::envs
