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

#include "ed2/agent/config.hpp"

#include <cmath>

namespace ed2::agent {

std::string to_string(VoteMode mode) {
  switch (mode) {
    case VoteMode::kOff:
      return "off";
    case VoteMode::kArbitraryCritic:
      return "arbitrary_critic";
    case VoteMode::kEnsembleCritic:
      return "ensemble_critic";
  }
  return "off";
}

VoteMode parse_vote_mode(const std::string& text) {
  if (text == "off") return VoteMode::kOff;
  if (text == "arbitrary_critic") return VoteMode::kArbitraryCritic;
  if (text == "ensemble_critic") return VoteMode::kEnsembleCritic;
  throw AgentError("unknown vote mode '" + text + "' (expected off, arbitrary_critic or ensemble_critic)");
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw AgentError(what);
}

}  // namespace

void VariantFlags::validate() const {
  require(std::isfinite(gaussian_noise_std) && gaussian_noise_std >= 0.0, "gaussian_noise_std must be >= 0");
  require(std::isfinite(ucb_lambda) && ucb_lambda >= 0.0, "ucb_lambda must be >= 0");
  require(weighted_backup_eps > 0.0 && weighted_backup_eps <= 1.0, "weighted_backup_eps must lie in (0, 1]");
  require(std::isfinite(weighted_backup_temperature) && weighted_backup_temperature >= 0.0,
          "weighted_backup_temperature must be >= 0");
  require(std::isfinite(prior_beta) && prior_beta >= 0.0, "prior_beta must be >= 0");
  require(bootstrap_probability > 0.0 && bootstrap_probability <= 1.0, "bootstrap_probability must lie in (0, 1]");
  require(huber_delta > 0.0, "huber_delta must be positive");
  require(!(ucb_enabled && vote_policy_mode != VoteMode::kOff), "ucb and vote exploration are exclusive");
}

void AgentConfig::validate() const {
  require(state_dim > 0 && action_dim > 0, "state and action dimensions must be positive");
  require(std::isfinite(max_action) && max_action > 0.0, "max_action must be positive");
  require(members > 0, "ensemble needs at least one member");
  for (auto h : hidden) require(h > 0, "hidden widths must be positive");
  require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
  require(polyak >= 0.0 && polyak <= 1.0, "polyak must lie in [0, 1]");
  require(actor_lr >= 0.0 && critic_lr >= 0.0, "learning rates must be >= 0");
  require(std::isfinite(target_noise) && target_noise >= 0.0, "target_noise must be >= 0");
  flags.validate();
}

}  // namespace ed2::agent
