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

#include "ed2/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ed2::metrics {

std::vector<double> RunSeries::phase_means() const {
  std::vector<double> out;
  out.reserve(phases.size());
  for (const EvalPhase& p : phases) {
    if (p.returns.empty()) throw MetricsError("run series: evaluation phase without returns");
    double sum = 0.0;
    for (double r : p.returns) sum += r;
    out.push_back(sum / static_cast<double>(p.returns.size()));
  }
  return out;
}

ReturnStats mean_std_return(std::span<const double> returns) {
  if (returns.size() < 2) {
    throw MetricsError("mean_std_return: need at least 2 returns, got " + std::to_string(returns.size()));
  }
  double sum = 0.0;
  for (double r : returns) {
    if (!std::isfinite(r)) throw MetricsError("mean_std_return: non-finite return");
    sum += r;
  }
  const double n = static_cast<double>(returns.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double r : returns) ss += (r - mean) * (r - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

double rmsd(std::span<const double> m, std::size_t lag) {
  if (m.size() <= lag) {
    throw MetricsError("rmsd: series of length " + std::to_string(m.size()) + " has no pairs at lag " +
                       std::to_string(lag));
  }
  double ss = 0.0;
  for (std::size_t i = lag; i < m.size(); ++i) {
    const double drop = std::max(m[i - lag] - m[i], 0.0);
    ss += drop * drop;
  }
  return std::sqrt(ss / static_cast<double>(m.size() - lag));
}

double rmsd(const RunSeries& series, std::size_t lag) { return rmsd(series.phase_means(), lag); }

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw MetricsError("quantile: empty input");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SeedSummary summarize_values(std::span<const double> values) {
  if (values.empty()) throw MetricsError("seed_summary: no runs");
  SeedSummary s;
  s.finals.assign(values.begin(), values.end());
  std::vector<double> sorted = s.finals;
  std::sort(sorted.begin(), sorted.end());
  s.median = quantile_sorted(sorted, 0.5);
  s.q1 = quantile_sorted(sorted, 0.25);
  s.q3 = quantile_sorted(sorted, 0.75);
  s.iqr = s.q3 - s.q1;
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

SeedSummary seed_summary(std::span<const RunSeries> runs) {
  std::vector<double> finals;
  finals.reserve(runs.size());
  for (const RunSeries& r : runs) {
    if (r.phases.empty()) throw MetricsError("seed_summary: seed " + std::to_string(r.seed) + " has no phases");
    finals.push_back(r.phase_means().back());
  }
  return summarize_values(finals);
}

Interval bootstrap_ci(std::span<const double> values, std::mt19937_64& rng, double level,
                      std::size_t resamples) {
  if (values.size() < 2) throw MetricsError("bootstrap_ci: need at least 2 values");
  if (!(level > 0.0 && level < 1.0)) throw MetricsError("bootstrap_ci: level must be in (0, 1)");
  if (resamples == 0) throw MetricsError("bootstrap_ci: resamples must be positive");
  const std::size_t n = values.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(resamples);
  for (double& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[pick(rng)];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile_sorted(means, tail), quantile_sorted(means, 1.0 - tail)};
}

std::vector<double> ema_smooth(std::span<const double> series, double alpha) {
  if (series.empty()) throw MetricsError("ema_smooth: empty series");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw MetricsError("ema_smooth: alpha must be in (0, 1]");
  std::vector<double> out(series.size());
  out[0] = series[0];
  // Written as s + alpha (x - s) so a constant series is a fixed point bitwise.
  for (std::size_t t = 1; t < series.size(); ++t) out[t] = out[t - 1] + alpha * (series[t] - out[t - 1]);
  return out;
}

}  // namespace ed2::metrics
