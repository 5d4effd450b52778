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
#include <functional>

#include "ed2/harness/config.hpp"
#include "ed2/harness/runlog.hpp"

namespace ed2::harness {

/// Called after each evaluation phase, e.g. for progress output.
using EvalCallback = std::function<void(const EvalRecord&)>;

/// Runs one seed to completion. Environment or agent errors and non-finite
/// losses end the run early with status "aborted" and a reason; invalid
/// configs throw HarnessError.
RunLog train_run(const ExperimentConfig& config, std::uint64_t seed, const EvalCallback& on_eval = {});

/// Number of evaluation phases after which RMSD becomes defined.
inline constexpr std::size_t kRmsdLag = 20;

}  // namespace ed2::harness
