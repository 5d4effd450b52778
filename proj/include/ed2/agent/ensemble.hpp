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
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ed2/agent/config.hpp"
#include "ed2/numcore/adam.hpp"
#include "ed2/numcore/mlp.hpp"
#include "ed2/replay/buffer.hpp"

namespace ed2::agent {

using numcore::MlpParams;
using numcore::Tensor;
using Rng = std::mt19937_64;

/// Per critic pair: Bellman targets y [n,1], backup weights w [n,1] and the
/// smoothed target actions a' [n, action_dim] they were computed at.
struct TrainTargets {
  std::vector<Tensor> y;
  std::vector<Tensor> weights;
  std::vector<Tensor> next_actions;
};

struct UpdateStats {
  double critic_loss = 0.0;  // mean over trained critics
  double actor_loss = 0.0;   // mean over actors
  double mean_q = 0.0;       // mean Q_{k,1}(s, mu_k(s)) over actors
  bool finite = true;
};

/// K deterministic actors with K critic pairs (one under single_critic),
/// their Polyak targets and optional frozen prior nets.
///
/// Critic pair p serves actor p; under single_critic every actor uses pair 0
/// and the pair is trained on actor 0's targets.
class Ensemble {
 public:
  Ensemble(AgentConfig config, std::uint64_t seed);

  const AgentConfig& config() const { return config_; }
  std::size_t members() const { return config_.members; }
  std::size_t critic_pairs() const { return critics_.size(); }
  std::size_t pair_of(std::size_t actor) const { return config_.flags.single_critic ? 0 : actor; }

  // --- acting -------------------------------------------------------------
  /// Uniform over [0, K); always 0 under single_actor_explore.
  std::size_t select_episode_actor(Rng& rng) const;
  /// Samples and fixes this episode's actor (and vote critic) index c.
  std::size_t begin_episode();
  std::size_t current_actor() const { return current_; }
  void set_current_actor(std::size_t c);

  /// Data-collection action: actor c, or the vote/UCB choice when enabled,
  /// plus Gaussian noise when enabled, clamped to [-M, M].
  std::vector<double> explore_action(std::span<const double> state);
  /// Mean of the K final actions (actor 0 alone under single_actor_eval,
  /// the ensemble-critic vote under vote_eval).
  std::vector<double> evaluate_action(std::span<const double> state) const;
  /// M tanh(normalize(mu_k(s))).
  std::vector<double> member_action(std::size_t k, std::span<const double> state) const;
  /// Candidate of the best-scoring actor; arbitrary mode scores with the
  /// critic of the current episode index.
  std::vector<double> vote_action(std::span<const double> state, VoteMode mode) const;
  /// Candidate maximizing mean + lambda * std over the first critics.
  std::vector<double> ucb_action(std::span<const double> state, double lambda) const;

  // --- values -------------------------------------------------------------
  /// Q_{p,i}(s, a) over a batch, prior included; `target` picks the target net.
  Tensor q_values(std::size_t pair, std::size_t i, const Tensor& states, const Tensor& actions, bool target) const;
  double q_value(std::size_t pair, std::size_t i, std::span<const double> state, std::span<const double> action,
                 bool target = false) const;

  // --- learning -----------------------------------------------------------
  TrainTargets compute_targets(const replay::Batch& batch, Rng& rng) const;
  /// One gradient step for every critic and actor on `batch`, then Polyak.
  UpdateStats update_step(const replay::Batch& batch);
  std::uint64_t update_count() const { return updates_; }

  // --- parameters ---------------------------------------------------------
  MlpParams& actor(std::size_t k) { return actors_.at(k); }
  const MlpParams& actor(std::size_t k) const { return actors_.at(k); }
  MlpParams& critic(std::size_t p, std::size_t i) { return critics_.at(p).at(i); }
  const MlpParams& critic(std::size_t p, std::size_t i) const { return critics_.at(p).at(i); }
  MlpParams& target_critic(std::size_t p, std::size_t i) { return targets_.at(p).at(i); }
  const MlpParams& target_critic(std::size_t p, std::size_t i) const { return targets_.at(p).at(i); }
  /// Hard copy of every critic into its target.
  void sync_targets() { targets_ = critics_; }
  const MlpParams& prior(std::size_t p, std::size_t i) const { return priors_.at(p).at(i); }
  bool parameters_finite() const;
  /// Parameters of every network, in a fixed order, for equality checks.
  std::vector<double> flat_parameters() const;

  /// Writes nets.ckpt (all networks) and manifest.json (K, flags, counters,
  /// RNG streams) into `dir`. Optimizer moments are not saved.
  void save(const std::filesystem::path& dir) const;
  static Ensemble load(const std::filesystem::path& dir);

 private:
  Tensor actor_outputs(std::size_t k, const Tensor& states) const;
  Tensor squash_batch(const Tensor& raw) const;
  double critic_step(std::size_t p, std::size_t i, const replay::Batch& batch, const Tensor& sa, const Tensor& y,
                     const Tensor& w, double denom);
  double actor_step(std::size_t k, const replay::Batch& batch, double& mean_q);
  std::vector<double> apply_noise(std::vector<double> action);

  AgentConfig config_;
  std::vector<MlpParams> actors_;
  std::vector<std::array<MlpParams, 2>> critics_;
  std::vector<std::array<MlpParams, 2>> targets_;
  std::vector<std::array<MlpParams, 2>> priors_;
  std::vector<numcore::AdamState> actor_opt_;
  std::vector<std::array<numcore::AdamState, 2>> critic_opt_;

  Rng explore_rng_;
  Rng train_rng_;
  std::size_t current_ = 0;
  std::uint64_t updates_ = 0;
};

/// Row-wise [states | actions].
Tensor concat_rows(const Tensor& states, const Tensor& actions);

}  // namespace ed2::agent
