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

#include "ed2/harness/config.hpp"
#include "ed2/harness/runlog.hpp"

namespace ed2::harness {

/// One line of the summary CSV. The interval is a 95% percentile bootstrap
/// of the across-seed mean, present only for mean-type metrics.
struct SummaryRow {
  std::string metric;
  std::string env;
  std::string variant;
  std::size_t seed_count = 0;
  double value = 0.0;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
};

/// Groups completed logs by (env, variant) and reports, per group:
/// final_return_mean, final_return_median, final_return_iqr, test_std,
/// rmsd, solved_seeds, solve_step_median and member_test_std (when logged).
/// Logs are ordered by seed first, so input order never matters.
std::vector<SummaryRow> summarize_logs(std::vector<RunLog> logs);

/// RFC 4180 CSV with header metric,env,variant,seed_count,value,ci_lo,ci_hi.
std::string summary_csv(const std::vector<SummaryRow>& rows);

struct SeedFailure {
  std::uint64_t seed = 0;
  std::string message;
};

struct SuiteResult {
  std::vector<RunLog> logs;  // ordered like the seed list
  std::vector<SeedFailure> failures;
  std::vector<SummaryRow> summary;
};

/// Runs each seed independently on up to `threads` workers (0 picks the
/// hardware concurrency). A failing or aborted seed is reported and the
/// rest continue. With a non-empty `out_dir`, writes one
/// `<variant>_seed<n>.jsonl` per run and `summary.csv`.
SuiteResult run_suite(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                      std::size_t threads = 0, const std::string& out_dir = "");

/// Per evaluation step: across-seed mean of the phase averages, its
/// bootstrap interval, and EMA-smoothed copies of all three. All logs must
/// share the same evaluation steps.
std::string emit_plot_data(const std::vector<RunLog>& logs, double alpha = 0.4);

}  // namespace ed2::harness
