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

// ed2lab: train, run seed suites, summarize logs and emit plot data.
//
// Output files go to $ED2_OUTPUT_DIR (default ./ed2_runs). Exit status is 0
// on success, 1 for usage or input errors, 2 when a run aborted.

#include <glob.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "ed2/harness/config.hpp"
#include "ed2/harness/runlog.hpp"
#include "ed2/harness/suite.hpp"
#include "ed2/harness/train.hpp"

namespace fs = std::filesystem;
using namespace ed2::harness;

namespace {

std::string output_dir() {
  const char* dir = std::getenv("ED2_OUTPUT_DIR");
  return dir && *dir ? dir : "ed2_runs";
}

ExperimentConfig build_config(const std::string& path, bool paper, const std::vector<std::string>& overrides) {
  ExperimentConfig config = path.empty() ? ExperimentConfig{} : load_config(path);
  if (paper) config = paper_scale(config);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw HarnessError("--set expects key=value, got '" + kv + "'");
    set_field(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  config.validate();
  return config;
}

std::vector<std::string> expand(const std::vector<std::string>& patterns) {
  std::vector<std::string> paths;
  for (const std::string& p : patterns) {
    glob_t g{};
    if (::glob(p.c_str(), 0, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
    }
    globfree(&g);
  }
  if (paths.empty()) throw HarnessError("no log files match the given pattern");
  return paths;
}

std::vector<RunLog> read_logs(const std::vector<std::string>& patterns) {
  std::vector<RunLog> logs;
  for (const std::string& p : expand(patterns)) logs.push_back(read_run_log(p));
  return logs;
}

void print_eval(std::uint64_t seed, const EvalRecord& e) {
  std::cerr << "seed " << seed << " step " << e.env_step << " return " << e.mean << " +- " << e.std << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ED2 ensemble actor-critic laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  bool paper = false;
  std::vector<std::string> overrides;
  auto add_config_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Flat key = value config file");
    cmd->add_flag("--paper-scale", paper, "Use the published network and buffer sizes");
    cmd->add_option("--set", overrides, "Override a config field (key=value)");
  };

  auto* train = app.add_subcommand("train", "Train one seed");
  std::uint64_t seed = 0;
  add_config_options(train);
  train->add_option("--seed", seed, "Run seed")->required();

  auto* suite = app.add_subcommand("suite", "Train several seeds and summarize");
  std::string seed_text;
  std::size_t threads = 0;
  add_config_options(suite);
  suite->add_option("--seeds", seed_text, "Seeds: a..b, a,b,c or one value")->required();
  suite->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* metrics_cmd = app.add_subcommand("metrics", "Summary CSV for existing run logs");
  std::vector<std::string> patterns;
  metrics_cmd->add_option("--logs", patterns, "Log file glob(s)")->required();

  auto* plot = app.add_subcommand("plotdata", "Smoothed per-step means with confidence bands");
  double alpha = 0.4;
  plot->add_option("--logs", patterns, "Log file glob(s)")->required();
  plot->add_option("--alpha", alpha, "EMA smoothing factor");

  auto* defaults = app.add_subcommand("defaults", "Print the default config");
  add_config_options(defaults);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      const ExperimentConfig config = build_config(config_path, paper, overrides);
      const RunLog log = train_run(config, seed, [&](const EvalRecord& e) { print_eval(seed, e); });
      fs::create_directories(output_dir());
      const std::string path =
          (fs::path(output_dir()) / (config.variant + "_seed" + std::to_string(seed) + ".jsonl")).string();
      write_run_log(log, path);
      std::cout << path << "\n";
      if (!log.ok()) {
        std::cerr << "run aborted: " << log.abort_reason << "\n";
        return 2;
      }
    } else if (*suite) {
      const ExperimentConfig config = build_config(config_path, paper, overrides);
      const SuiteResult result = run_suite(config, parse_seed_list(seed_text), threads, output_dir());
      std::cout << summary_csv(result.summary);
      for (const SeedFailure& f : result.failures) std::cerr << "seed " << f.seed << " failed: " << f.message << "\n";
      if (!result.failures.empty()) return 2;
    } else if (*metrics_cmd) {
      const auto logs = read_logs(patterns);
      std::cout << summary_csv(summarize_logs(logs));
    } else if (*plot) {
      std::cout << emit_plot_data(read_logs(patterns), alpha);
    } else if (*defaults) {
      std::cout << to_text(build_config(config_path, paper, overrides));
    }
  } catch (const std::exception& e) {
    std::cerr << "ed2lab: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
