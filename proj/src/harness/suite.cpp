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

#include "ed2/harness/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include "ed2/harness/train.hpp"

namespace ed2::harness {

namespace {

constexpr std::uint64_t kBootstrapSeed = 0x5eed5eedULL;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

metrics::Interval mean_interval(const std::vector<double>& v) {
  if (v.size() < 2) return {v.front(), v.front()};
  std::mt19937_64 rng(kBootstrapSeed);
  return metrics::bootstrap_ci(v, rng);
}

}  // namespace

std::vector<SummaryRow> summarize_logs(std::vector<RunLog> logs) {
  std::stable_sort(logs.begin(), logs.end(), [](const RunLog& a, const RunLog& b) { return a.seed < b.seed; });
  std::map<std::pair<std::string, std::string>, std::vector<const RunLog*>> groups;
  for (const RunLog& log : logs) {
    if (log.ok() && !log.evals.empty()) groups[{log.env, log.variant}].push_back(&log);
  }

  std::vector<SummaryRow> rows;
  for (const auto& [key, group] : groups) {
    const auto& [env, variant] = key;
    auto mean_row = [&](const std::string& metric, const std::vector<double>& v) {
      if (v.empty()) return;
      const auto ci = mean_interval(v);
      rows.push_back({metric, env, variant, v.size(), mean_of(v), ci.lo, ci.hi});
    };
    auto plain_row = [&](const std::string& metric, std::size_t n, double value) {
      rows.push_back({metric, env, variant, n, value, std::nullopt, std::nullopt});
    };

    std::vector<double> finals, stds, rmsds, solve_steps, member_stds;
    for (const RunLog* log : group) {
      const EvalRecord& last = log->evals.back();
      finals.push_back(last.mean);
      stds.push_back(last.std);
      if (log->rmsd) rmsds.push_back(*log->rmsd);
      if (log->solve_step) solve_steps.push_back(static_cast<double>(*log->solve_step));
      if (!last.member_std.empty()) member_stds.push_back(mean_of(last.member_std));
    }
    const auto summary = metrics::summarize_values(finals);
    mean_row("final_return_mean", finals);
    plain_row("final_return_median", finals.size(), summary.median);
    plain_row("final_return_iqr", finals.size(), summary.iqr);
    mean_row("test_std", stds);
    mean_row("rmsd", rmsds);
    plain_row("solved_seeds", group.size(), static_cast<double>(solve_steps.size()));
    if (!solve_steps.empty()) {
      plain_row("solve_step_median", solve_steps.size(), metrics::summarize_values(solve_steps).median);
    }
    mean_row("member_test_std", member_stds);
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "metric,env,variant,seed_count,value,ci_lo,ci_hi\r\n";
  for (const SummaryRow& r : rows) {
    out += csv_field(r.metric) + "," + csv_field(r.env) + "," + csv_field(r.variant) + "," +
           std::to_string(r.seed_count) + "," + format_number(r.value) + "," +
           (r.ci_lo ? format_number(*r.ci_lo) : "") + "," + (r.ci_hi ? format_number(*r.ci_hi) : "") + "\r\n";
  }
  return out;
}

SuiteResult run_suite(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds, std::size_t threads,
                      const std::string& out_dir) {
  if (seeds.empty()) throw HarnessError("suite: no seeds");
  config.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, seeds.size());

  std::vector<std::optional<RunLog>> results(seeds.size());
  std::vector<std::string> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        results[i] = train_run(config, seeds[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SuiteResult out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!results[i]) {
      out.failures.push_back({seeds[i], errors[i]});
      continue;
    }
    if (!results[i]->ok()) out.failures.push_back({seeds[i], results[i]->abort_reason});
    out.logs.push_back(std::move(*results[i]));
  }
  out.summary = summarize_logs(out.logs);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (const RunLog& log : out.logs) {
      write_run_log(log, (std::filesystem::path(out_dir) /
                          (config.variant + "_seed" + std::to_string(log.seed) + ".jsonl"))
                             .string());
    }
    std::ofstream csv(std::filesystem::path(out_dir) / "summary.csv", std::ios::binary);
    csv << summary_csv(out.summary);
    if (!csv) throw HarnessError("suite: cannot write summary.csv in " + out_dir);
  }
  return out;
}

std::string emit_plot_data(const std::vector<RunLog>& logs, double alpha) {
  if (logs.empty()) throw HarnessError("plotdata: no logs");
  const RunLog& ref = logs.front();
  for (const RunLog& log : logs) {
    const std::size_t n = std::max(log.evals.size(), ref.evals.size());
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_log = i < log.evals.size();
      const bool in_ref = i < ref.evals.size();
      if (in_log && in_ref && log.evals[i].env_step == ref.evals[i].env_step) continue;
      const std::uint64_t step = in_ref && (!in_log || ref.evals[i].env_step < log.evals[i].env_step)
                                     ? ref.evals[i].env_step
                                     : log.evals[i].env_step;
      throw HarnessError("plotdata: evaluation steps are not aligned; step " + std::to_string(step) +
                         " differs between seed " + std::to_string(ref.seed) + " and seed " +
                         std::to_string(log.seed));
    }
  }

  const std::size_t phases = ref.evals.size();
  std::vector<double> means(phases), lo(phases), hi(phases);
  for (std::size_t i = 0; i < phases; ++i) {
    std::vector<double> v;
    for (const RunLog& log : logs) v.push_back(log.evals[i].mean);
    means[i] = mean_of(v);
    const auto ci = mean_interval(v);
    lo[i] = ci.lo;
    hi[i] = ci.hi;
  }

  std::string out = "env_step,seed_count,mean,ci_lo,ci_hi,mean_ema,ci_lo_ema,ci_hi_ema\r\n";
  if (phases == 0) return out;
  const auto sm = metrics::ema_smooth(means, alpha);
  const auto sl = metrics::ema_smooth(lo, alpha);
  const auto sh = metrics::ema_smooth(hi, alpha);
  for (std::size_t i = 0; i < phases; ++i) {
    out += std::to_string(ref.evals[i].env_step) + "," + std::to_string(logs.size()) + "," + format_number(means[i]) +
           "," + format_number(lo[i]) + "," + format_number(hi[i]) + "," + format_number(sm[i]) + "," +
           format_number(sl[i]) + "," + format_number(sh[i]) + "\r\n";
  }
  return out;
}

}  // namespace ed2::harness
