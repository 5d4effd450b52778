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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ed2::agent {

class AgentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class VoteMode { kOff, kArbitraryCritic, kEnsembleCritic };

std::string to_string(VoteMode mode);
VoteMode parse_vote_mode(const std::string& text);

/// Ensemble variants. Everything off is plain ED2.
struct VariantFlags {
  /// Exploration noise, in units of the action bound M. 0 disables it.
  double gaussian_noise_std = 0.0;
  bool ucb_enabled = false;
  double ucb_lambda = 1.0;
  bool weighted_backup_enabled = false;
  double weighted_backup_eps = 0.5;
  double weighted_backup_temperature = 10.0;
  bool clipped_double_q = true;
  /// Vote policy used while collecting data.
  VoteMode vote_policy_mode = VoteMode::kOff;
  /// Vote policy (ensemble critic) used for evaluation instead of averaging.
  bool vote_eval = false;
  bool prior_nets_enabled = false;
  double prior_beta = 1.0;
  bool data_bootstrap_enabled = false;
  double bootstrap_probability = 0.5;
  /// One critic pair shared by every actor.
  bool single_critic = false;
  bool shared_actor_init = false;
  /// The first actor collects all data.
  bool single_actor_explore = false;
  /// The first actor alone is evaluated.
  bool single_actor_eval = false;
  bool action_normalization = true;
  bool huber_loss = false;
  double huber_delta = 1.0;

  void validate() const;
};

struct AgentConfig {
  std::size_t state_dim = 1;
  std::size_t action_dim = 1;
  double max_action = 1.0;
  std::size_t members = 5;
  std::vector<std::size_t> hidden = {256, 256};
  double gamma = 0.99;
  double polyak = 0.995;
  double actor_lr = 1e-4;
  double critic_lr = 1e-4;
  /// Target-policy smoothing noise (pre-tanh, unclipped).
  double target_noise = 0.2;
  VariantFlags flags;

  void validate() const;
  /// Critic pairs actually trained: 1 under single_critic, otherwise K.
  std::size_t critic_pairs() const { return flags.single_critic ? 1 : members; }
};

}  // namespace ed2::agent
