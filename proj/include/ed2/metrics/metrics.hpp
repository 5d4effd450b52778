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
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace ed2::metrics {

class MetricsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Test returns from one evaluation phase.
struct EvalPhase {
  std::uint64_t env_step = 0;
  std::vector<double> returns;
};

/// Evaluation phases of one seed, ordered by env_step.
struct RunSeries {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<EvalPhase> phases;

  /// Per-phase average returns.
  std::vector<double> phase_means() const;
};

struct ReturnStats {
  double mean = 0.0;
  /// Sample standard deviation (N - 1 denominator).
  double std = 0.0;
};

/// Requires at least two finite returns.
ReturnStats mean_std_return(std::span<const double> returns);
inline ReturnStats mean_std_return(const EvalPhase& phase) { return mean_std_return(phase.returns); }

/// sqrt(mean over i > lag of max(m[i - lag] - m[i], 0)^2). Needs more than
/// `lag` entries.
double rmsd(std::span<const double> phase_means, std::size_t lag = 20);
double rmsd(const RunSeries& series, std::size_t lag = 20);

/// Linear-interpolation (type 7) quantile of an ascending range.
double quantile_sorted(std::span<const double> sorted, double p);

struct SeedSummary {
  std::vector<double> finals;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double min = 0.0;
  double max = 0.0;
};

SeedSummary summarize_values(std::span<const double> values);
/// Summary of each run's final-phase average return.
SeedSummary seed_summary(std::span<const RunSeries> runs);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap interval for the mean.
Interval bootstrap_ci(std::span<const double> values, std::mt19937_64& rng, double level = 0.95,
                      std::size_t resamples = 10000);

/// s[0] = x[0], s[t] = alpha x[t] + (1 - alpha) s[t - 1].
std::vector<double> ema_smooth(std::span<const double> series, double alpha = 0.4);

}  // namespace ed2::metrics
