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
#include <optional>
#include <string>
#include <vector>

#include "ed2/metrics/metrics.hpp"

namespace ed2::harness {

/// A finished training episode.
struct EpisodeRecord {
  std::uint64_t env_step = 0;  // step count when the episode ended
  std::size_t length = 0;
  double ret = 0.0;
  bool success = false;
  std::size_t actor = 0;
};

/// One update burst; losses are averaged over its gradient steps.
struct BurstRecord {
  std::uint64_t env_step = 0;
  std::uint64_t updates = 0;  // cumulative gradient steps after the burst
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double mean_q = 0.0;
  double eta = 1.0;
};

/// One evaluation phase.
struct EvalRecord {
  std::uint64_t env_step = 0;
  std::vector<double> returns;
  double mean = 0.0;
  double std = 0.0;
  double success_rate = 0.0;
  /// Per-member returns on the same start states (member_eval only).
  std::vector<std::vector<double>> member_returns;
  std::vector<double> member_std;
};

struct RunLog {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string env;
  std::string variant;
  /// Full config text, so a log is self-describing.
  std::string config_text;

  std::vector<EpisodeRecord> episodes;
  std::vector<BurstRecord> bursts;
  std::vector<EvalRecord> evals;

  /// "ok" or "aborted".
  std::string status = "ok";
  std::string abort_reason;
  std::uint64_t env_steps = 0;
  std::uint64_t updates = 0;
  std::optional<double> rmsd;
  /// First evaluation step at which at least half the episodes succeeded.
  std::optional<std::uint64_t> solve_step;

  bool ok() const { return status == "ok"; }
  metrics::RunSeries series() const;
};

/// JSON lines: header, then episode/burst/eval records by env_step (ties in
/// that order), then a final record.
std::string to_jsonl(const RunLog& log);
RunLog parse_jsonl(const std::string& text);

void write_run_log(const RunLog& log, const std::string& path);
RunLog read_run_log(const std::string& path);

}  // namespace ed2::harness
