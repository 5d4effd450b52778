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

#include "ed2/envs/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ed2::envs {

namespace {

void require_state_size(std::span<const double> state, std::size_t n, const char* env) {
  if (state.size() != n) {
    throw EnvError(std::string(env) + ": expected internal state of size " + std::to_string(n) + ", got " +
                   std::to_string(state.size()));
  }
}

/// Explicit Euler step of the damped planar point mass. Returns the pre-step
/// x velocity.
double integrate_point_mass(std::vector<double>& s, std::span<const double> u, const PointMassOptions& o) {
  const double vx = s[2];
  const double vy = s[3];
  s[0] += vx * o.dt;
  s[1] += vy * o.dt;
  s[2] += (u[0] - o.drag * vx) * o.dt;
  s[3] += (u[1] - o.drag * vy) * o.dt;
  return vx;
}

EnvSpec point_mass_spec(const PointMassOptions& o) {
  return EnvSpec{4, 2, o.max_force, o.episode_length, o.init_noise_scale};
}

}  // namespace

// --- Pendulum ---------------------------------------------------------------

Pendulum::Pendulum(PendulumOptions options)
    : SimulatedEnv(EnvSpec{3, 1, options.max_torque, options.episode_length, options.init_noise_scale}),
      options_(options) {
  state_ = nominal_state();
}

double Pendulum::angle_normalize(double theta) {
  constexpr double pi = std::numbers::pi;
  double t = std::fmod(theta + pi, 2.0 * pi);
  if (t < 0.0) t += 2.0 * pi;
  return t - pi;
}

std::vector<double> Pendulum::nominal_state() const { return {std::numbers::pi, 0.0}; }

std::vector<double> Pendulum::reset_half_widths() const { return {std::numbers::pi, 1.0}; }

void Pendulum::set_internal_state(std::span<const double> state) {
  require_state_size(state, 2, "pendulum");
  state_.assign(state.begin(), state.end());
}

std::vector<double> Pendulum::observe() const { return {std::cos(state_[0]), std::sin(state_[0]), state_[1]}; }

StepResult Pendulum::advance(std::span<const double> action) {
  const auto& o = options_;
  const double theta = state_[0];
  const double omega = state_[1];
  const double u = action[0];
  const double th = angle_normalize(theta);

  StepResult r;
  r.reward = -(th * th + 0.1 * omega * omega + 0.001 * u * u);

  const double accel =
      3.0 * o.gravity / (2.0 * o.length) * std::sin(theta) + 3.0 / (o.mass * o.length * o.length) * u;
  const double new_omega = std::clamp(omega + accel * o.dt, -o.max_speed, o.max_speed);
  state_[0] = theta + new_omega * o.dt;
  state_[1] = new_omega;
  r.next_state = observe();
  return r;
}

// --- Point-mass runner --------------------------------------------------------

PointMassRunner::PointMassRunner(PointMassOptions options)
    : SimulatedEnv(point_mass_spec(options)), options_(options) {
  state_ = nominal_state();
}

std::vector<double> PointMassRunner::nominal_state() const { return {0.0, 0.0, 0.0, 0.0}; }

std::vector<double> PointMassRunner::reset_half_widths() const {
  return {options_.position_noise, options_.position_noise, options_.velocity_noise, options_.velocity_noise};
}

void PointMassRunner::set_internal_state(std::span<const double> state) {
  require_state_size(state, 4, "pointmass");
  state_.assign(state.begin(), state.end());
}

StepResult PointMassRunner::advance(std::span<const double> action) {
  const double forward = integrate_point_mass(state_, action, options_);
  const double control = options_.control_cost * (action[0] * action[0] + action[1] * action[1]);
  StepResult r;
  r.progress_reward = forward;
  r.reward = forward - control;
  r.next_state = state_;
  return r;
}

// --- Rings ---------------------------------------------------------------------

RingsOptions RingsOptions::defaults() {
  RingsOptions o;
  o.stacks = {CircleStack{{4.0, 0.0}, {3.0, 2.0, 1.0}}, CircleStack{{-4.0, 0.0}, {3.0, 2.0, 1.0}}};
  return o;
}

Rings::Rings(RingsOptions options) : SimulatedEnv(point_mass_spec(options.body)), options_(std::move(options)) {
  for (auto& stack : options_.stacks) {
    if (stack.radii.empty()) throw EnvError("rings: every circle stack needs at least one radius");
    std::sort(stack.radii.begin(), stack.radii.end(), std::greater<>());
  }
  state_ = nominal_state();
}

std::vector<double> Rings::nominal_state() const { return {0.0, 0.0, 0.0, 0.0}; }

std::vector<double> Rings::reset_half_widths() const {
  const auto& b = options_.body;
  return {b.position_noise, b.position_noise, b.velocity_noise, b.velocity_noise};
}

void Rings::set_internal_state(std::span<const double> state) {
  require_state_size(state, 4, "rings");
  state_.assign(state.begin(), state.end());
}

std::size_t Rings::circles_containing(double x, double y) const {
  std::size_t count = 0;
  for (const auto& stack : options_.stacks) {
    const double d = std::hypot(x - stack.center[0], y - stack.center[1]);
    for (double radius : stack.radii)
      if (d <= radius) ++count;
  }
  return count;
}

bool Rings::in_innermost(double x, double y) const {
  return std::any_of(options_.stacks.begin(), options_.stacks.end(), [&](const CircleStack& s) {
    return std::hypot(x - s.center[0], y - s.center[1]) <= s.radii.back();
  });
}

StepResult Rings::advance(std::span<const double> action) {
  integrate_point_mass(state_, action, options_.body);
  StepResult r;
  r.reward = static_cast<double>(circles_containing(state_[0], state_[1]));
  r.success = in_innermost(state_[0], state_[1]);
  r.next_state = state_;
  return r;
}

}  // namespace ed2::envs
