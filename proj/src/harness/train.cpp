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

#include "ed2/harness/train.hpp"

#include <random>

#include "ed2/agent/ensemble.hpp"
#include "ed2/envs/factory.hpp"
#include "ed2/replay/buffer.hpp"
#include "ed2/replay/ere.hpp"

namespace ed2::harness {

namespace {

using Rng = std::mt19937_64;

// Tags 0-2 are taken by the ensemble's own streams.
enum StreamTag : std::uint32_t { kResets = 100, kWarmup, kSampling, kEval, kMasks };

Rng stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
  return Rng(seq);
}

struct EpisodeOutcome {
  double ret = 0.0;
  bool success = false;
};

template <typename Policy>
EpisodeOutcome play(envs::Env& env, std::uint64_t reset_seed, Policy&& policy) {
  EpisodeOutcome out;
  std::vector<double> s = env.reset(reset_seed);
  for (;;) {
    const envs::StepResult r = env.step(policy(s));
    out.ret += r.reward;
    out.success = out.success || r.success;
    if (r.done || r.truncated) return out;
    s = r.next_state;
  }
}

EvalRecord evaluate(const ExperimentConfig& config, const envs::Env& train_env, const agent::Ensemble& ensemble,
                    std::uint64_t env_step, Rng& eval_rng) {
  EvalRecord rec;
  rec.env_step = env_step;
  auto env = train_env.evaluation_copy();
  std::vector<std::uint64_t> starts(config.eval_episodes);
  for (auto& s : starts) s = eval_rng();

  std::size_t successes = 0;
  for (std::uint64_t start : starts) {
    const auto o = play(*env, start, [&](const std::vector<double>& s) { return ensemble.evaluate_action(s); });
    rec.returns.push_back(o.ret);
    successes += o.success ? 1 : 0;
  }
  const auto stats = metrics::mean_std_return(rec.returns);
  rec.mean = stats.mean;
  rec.std = stats.std;
  rec.success_rate = static_cast<double>(successes) / static_cast<double>(starts.size());

  if (config.member_eval) {
    for (std::size_t k = 0; k < ensemble.members(); ++k) {
      std::vector<double> returns;
      for (std::uint64_t start : starts) {
        returns.push_back(
            play(*env, start, [&](const std::vector<double>& s) { return ensemble.member_action(k, s); }).ret);
      }
      rec.member_std.push_back(metrics::mean_std_return(returns).std);
      rec.member_returns.push_back(std::move(returns));
    }
  }
  return rec;
}

}  // namespace

RunLog train_run(const ExperimentConfig& config, std::uint64_t seed, const EvalCallback& on_eval) {
  config.validate();
  RunLog log;
  log.config_hash = config_hash(config);
  log.seed = seed;
  log.env = config.env;
  log.variant = config.variant;
  log.config_text = to_text(config);

  try {
    envs::EnvOptions env_options;
    env_options.init_noise_scale = config.init_noise_scale;
    if (config.episode_length > 0) env_options.episode_length = config.episode_length;
    auto env = envs::make_env(config.env, config.wrappers, env_options);
    const envs::EnvSpec spec = env->spec();

    agent::Ensemble ensemble(config.agent_config(spec.state_dim, spec.action_dim, spec.max_action), seed);

    Rng reset_rng = stream(seed, kResets);
    Rng warmup_rng = stream(seed, kWarmup);
    Rng sample_rng = stream(seed, kSampling);
    Rng eval_rng = stream(seed, kEval);

    replay::BootstrapMasks masks;
    if (config.flags.data_bootstrap_enabled) {
      masks.members = config.members;
      masks.probability = config.flags.bootstrap_probability;
      masks.seed = stream(seed, kMasks)();
    }
    replay::ReplayBuffer buffer(config.buffer_size, spec.state_dim, spec.action_dim, masks);
    replay::EreState ere(config.ere_eta0);
    const std::size_t c_min = replay::ere_min_window(config.batch_size, config.buffer_size);
    std::uniform_real_distribution<double> warmup_action(-spec.max_action, spec.max_action);

    std::vector<double> state;
    bool need_reset = true;
    EpisodeRecord episode;

    for (std::uint64_t step = 1; step <= config.total_steps; ++step) {
      if (need_reset) {
        state = env->reset(reset_rng());
        ensemble.begin_episode();
        episode = EpisodeRecord{};
        need_reset = false;
      }

      std::vector<double> action;
      if (step <= config.warmup_steps) {
        action.resize(spec.action_dim);
        for (double& a : action) a = warmup_action(warmup_rng);
      } else {
        action = ensemble.explore_action(state);
      }
      envs::StepResult r = env->step(action);
      buffer.store({state, action, r.reward, r.next_state, r.done});
      episode.ret += r.reward;
      episode.length += 1;
      episode.success = episode.success || r.success;
      state = std::move(r.next_state);
      log.env_steps = step;

      if (r.done || r.truncated) {
        episode.env_step = step;
        episode.actor = ensemble.current_actor();
        log.episodes.push_back(episode);
        if (config.ere_enabled) replay::ere_eta_update(ere, episode.ret, episode.length, config.buffer_size);
        need_reset = true;
      }

      if (step % config.update_interval == 0 && config.updates_per_burst > 0) {
        BurstRecord burst;
        burst.env_step = step;
        burst.eta = config.ere_enabled ? ere.eta : 1.0;
        const std::size_t n = config.updates_per_burst;
        for (std::size_t b = 1; b <= n; ++b) {
          const replay::Batch batch =
              config.ere_enabled
                  ? buffer.sample_recent(replay::ere_window(buffer.size(), ere.eta, b, n, c_min), config.batch_size,
                                         sample_rng)
                  : buffer.sample_uniform(config.batch_size, sample_rng);
          const agent::UpdateStats stats = ensemble.update_step(batch);
          if (!stats.finite) {
            log.status = "aborted";
            log.abort_reason = "non-finite loss at gradient step " + std::to_string(ensemble.update_count()) +
                               " (env step " + std::to_string(step) + ")";
            break;
          }
          burst.critic_loss += stats.critic_loss / static_cast<double>(n);
          burst.actor_loss += stats.actor_loss / static_cast<double>(n);
          burst.mean_q += stats.mean_q / static_cast<double>(n);
        }
        log.updates = ensemble.update_count();
        if (!log.ok()) break;
        burst.updates = log.updates;
        log.bursts.push_back(burst);
      }

      if (step % config.eval_every == 0) {
        log.evals.push_back(evaluate(config, *env, ensemble, step, eval_rng));
        const EvalRecord& rec = log.evals.back();
        if (!log.solve_step && rec.success_rate >= 0.5) log.solve_step = step;
        if (on_eval) on_eval(rec);
        if (config.stop_when_solved && log.solve_step) break;
      }
    }
  } catch (const std::exception& e) {
    log.status = "aborted";
    log.abort_reason = e.what();
  }

  if (log.evals.size() > kRmsdLag) log.rmsd = metrics::rmsd(log.series(), kRmsdLag);
  return log;
}

}  // namespace ed2::harness
