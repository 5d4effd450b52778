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
#include <stdexcept>
#include <string>
#include <vector>

#include "ed2/agent/config.hpp"

namespace ed2::harness {

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything needed to reproduce a run except the seed. Defaults are the
/// desk-scale setup; `paper_scale()` restores the published sizes.
struct ExperimentConfig {
  /// Free-form label used in summaries ("ed2", "noise_baseline", ...).
  std::string variant = "ed2";
  std::string env = "pendulum";
  /// Wrapper specs in application order, e.g. {"sparse:1.0"}.
  std::vector<std::string> wrappers;
  /// 0 keeps the task's own time limit.
  std::size_t episode_length = 0;
  double init_noise_scale = 1.0;

  std::size_t members = 5;
  std::size_t hidden_width = 64;
  std::size_t hidden_layers = 2;
  double gamma = 0.99;
  double polyak = 0.995;
  double actor_lr = 1e-4;
  double critic_lr = 1e-4;
  double target_noise = 0.2;
  std::size_t batch_size = 256;
  std::size_t buffer_size = 100000;
  /// Environment steps between update bursts.
  std::size_t update_interval = 50;
  /// Gradient steps per burst.
  std::size_t updates_per_burst = 50;
  bool ere_enabled = true;
  double ere_eta0 = 0.995;
  /// Uniform random actions for this many initial steps.
  std::size_t warmup_steps = 1000;

  std::size_t total_steps = 50000;
  std::size_t eval_every = 2000;
  std::size_t eval_episodes = 30;
  /// Also evaluate every member's own policy on the same start states.
  bool member_eval = false;
  /// End training at the first evaluation phase counted as solved.
  bool stop_when_solved = false;

  agent::VariantFlags flags;
  std::vector<std::uint64_t> seeds = {0};

  void validate() const;
  agent::AgentConfig agent_config(std::size_t state_dim, std::size_t action_dim, double max_action) const;
};

/// Published sizes: buffer 1e6, 256-unit layers, eval every 1e4 steps.
ExperimentConfig paper_scale(ExperimentConfig config);

/// Every field as "key = value" lines in a fixed order; parse_config reads
/// it back exactly (doubles use the shortest round-trip form).
std::string to_text(const ExperimentConfig& config);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Applies a single "key=value" override.
void set_field(ExperimentConfig& config, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

/// FNV-1a over every field except the label and the seed list.
std::uint64_t config_hash(const ExperimentConfig& config);

/// "3", "0..4" (inclusive) or "1,5,9".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace ed2::harness
