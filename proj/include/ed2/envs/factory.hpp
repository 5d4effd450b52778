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
#include <optional>
#include <string>
#include <vector>

#include "ed2/envs/env.hpp"

namespace ed2::envs {

struct EnvOptions {
  double init_noise_scale = 1.0;
  /// Overrides the task's default time limit.
  std::optional<std::size_t> episode_length;
};

/// Splits "delayed:10,sparse:1.0" into its entries (whitespace ignored).
std::vector<std::string> parse_wrapper_list(const std::string& text);

/// Builds "pendulum", "pointmass" or "rings", then applies wrappers in list
/// order (first entry innermost). Wrapper grammar: "delayed[:k]",
/// "sparse[:threshold]", "obs_norm", "rew_norm".
std::unique_ptr<Env> make_env(const std::string& name, const std::vector<std::string>& wrappers = {},
                              const EnvOptions& options = {});

std::vector<std::string> known_env_names();

}  // namespace ed2::envs
