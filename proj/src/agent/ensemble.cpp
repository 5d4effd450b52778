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

#include "ed2/agent/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ed2/agent/action.hpp"
#include "ed2/numcore/checkpoint.hpp"
#include "ed2/numcore/graph.hpp"
#include "ed2/numcore/losses.hpp"

namespace ed2::agent {

using numcore::Graph;
using numcore::ParamMode;
using numcore::Var;
using json = nlohmann::json;

namespace {

Rng stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

std::vector<std::size_t> widths(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

Tensor column(const Tensor& m, std::size_t c) {
  Tensor out({m.rows(), 1});
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = m.at(r, c);
  return out;
}

Tensor row_tensor(std::span<const double> v) { return Tensor({1, v.size()}, std::vector<double>(v.begin(), v.end())); }

}  // namespace

Tensor concat_rows(const Tensor& states, const Tensor& actions) {
  const std::size_t n = states.rows();
  if (actions.rows() != n) throw numcore::ShapeError("concat_rows: row counts differ");
  const std::size_t ds = states.cols(), da = actions.cols();
  Tensor out({n, ds + da});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < ds; ++c) out.at(r, c) = states.at(r, c);
    for (std::size_t c = 0; c < da; ++c) out.at(r, ds + c) = actions.at(r, c);
  }
  return out;
}

Ensemble::Ensemble(AgentConfig config, std::uint64_t seed)
    : config_(std::move(config)), explore_rng_(stream(seed, 1)), train_rng_(stream(seed, 2)) {
  config_.validate();
  Rng init = stream(seed, 0);
  const auto actor_w = widths(config_.state_dim, config_.hidden, config_.action_dim);
  const auto critic_w = widths(config_.state_dim + config_.action_dim, config_.hidden, 1);

  for (std::size_t k = 0; k < config_.members; ++k) {
    if (config_.flags.shared_actor_init && k > 0) {
      actors_.push_back(actors_.front());
    } else {
      actors_.push_back(MlpParams::create(actor_w, init));
    }
  }
  const std::size_t pairs = config_.critic_pairs();
  for (std::size_t p = 0; p < pairs; ++p) {
    critics_.push_back({MlpParams::create(critic_w, init), MlpParams::create(critic_w, init)});
  }
  if (config_.flags.prior_nets_enabled) {
    for (std::size_t p = 0; p < pairs; ++p) {
      priors_.push_back({MlpParams::create(critic_w, init), MlpParams::create(critic_w, init)});
    }
  }
  targets_ = critics_;

  numcore::AdamConfig actor_cfg;
  actor_cfg.learning_rate = config_.actor_lr;
  numcore::AdamConfig critic_cfg;
  critic_cfg.learning_rate = config_.critic_lr;
  actor_opt_.assign(config_.members, numcore::AdamState(actor_cfg));
  critic_opt_.assign(pairs, {numcore::AdamState(critic_cfg), numcore::AdamState(critic_cfg)});
}

// --- acting ---------------------------------------------------------------

std::size_t Ensemble::select_episode_actor(Rng& rng) const {
  if (config_.flags.single_actor_explore) return 0;
  std::uniform_int_distribution<std::size_t> pick(0, config_.members - 1);
  return pick(rng);
}

std::size_t Ensemble::begin_episode() {
  current_ = select_episode_actor(explore_rng_);
  return current_;
}

void Ensemble::set_current_actor(std::size_t c) {
  if (c >= config_.members) throw AgentError("actor index out of range");
  current_ = c;
}

Tensor Ensemble::actor_outputs(std::size_t k, const Tensor& states) const {
  return numcore::mlp_forward(actors_.at(k), states);
}

Tensor Ensemble::squash_batch(const Tensor& raw) const {
  Tensor out = raw;
  const std::size_t a = raw.cols();
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    auto row = squash_action(std::span<const double>(raw.data() + r * a, a), config_.max_action,
                             config_.flags.action_normalization);
    std::copy(row.begin(), row.end(), out.data() + r * a);
  }
  return out;
}

std::vector<double> Ensemble::member_action(std::size_t k, std::span<const double> state) const {
  const Tensor raw = actor_outputs(k, row_tensor(state));
  return squash_action(raw.values(), config_.max_action, config_.flags.action_normalization);
}

std::vector<double> Ensemble::apply_noise(std::vector<double> action) {
  const double sd = config_.flags.gaussian_noise_std * config_.max_action;
  if (sd <= 0.0) return action;
  std::normal_distribution<double> noise(0.0, sd);
  for (double& v : action) v = std::clamp(v + noise(explore_rng_), -config_.max_action, config_.max_action);
  return action;
}

std::vector<double> Ensemble::explore_action(std::span<const double> state) {
  std::vector<double> a;
  if (config_.flags.ucb_enabled) {
    a = ucb_action(state, config_.flags.ucb_lambda);
  } else if (config_.flags.vote_policy_mode != VoteMode::kOff) {
    a = vote_action(state, config_.flags.vote_policy_mode);
  } else {
    a = member_action(current_, state);
  }
  return apply_noise(std::move(a));
}

std::vector<double> Ensemble::evaluate_action(std::span<const double> state) const {
  if (config_.flags.single_actor_eval) return member_action(0, state);
  if (config_.flags.vote_eval) return vote_action(state, VoteMode::kEnsembleCritic);
  std::vector<double> mean(config_.action_dim, 0.0);
  for (std::size_t k = 0; k < config_.members; ++k) {
    const auto a = member_action(k, state);
    for (std::size_t j = 0; j < a.size(); ++j) mean[j] += a[j];
  }
  for (double& v : mean) v /= static_cast<double>(config_.members);
  return mean;
}

std::vector<double> Ensemble::vote_action(std::span<const double> state, VoteMode mode) const {
  if (mode == VoteMode::kOff) throw AgentError("vote_action needs a vote mode");
  std::vector<std::vector<double>> candidates;
  std::vector<double> scores;
  for (std::size_t k = 0; k < config_.members; ++k) {
    candidates.push_back(member_action(k, state));
    double q = 0.0;
    if (mode == VoteMode::kArbitraryCritic) {
      q = q_value(pair_of(current_), 0, state, candidates.back());
    } else {
      for (std::size_t p = 0; p < critic_pairs(); ++p) q += q_value(p, 0, state, candidates.back());
      q /= static_cast<double>(critic_pairs());
    }
    scores.push_back(q);
  }
  return candidates[argmax_lowest(scores)];
}

std::vector<double> Ensemble::ucb_action(std::span<const double> state, double lambda) const {
  std::vector<std::vector<double>> candidates;
  std::vector<double> means, stds;
  for (std::size_t k = 0; k < config_.members; ++k) {
    candidates.push_back(member_action(k, state));
    std::vector<double> qs;
    for (std::size_t p = 0; p < critic_pairs(); ++p) qs.push_back(q_value(p, 0, state, candidates.back()));
    const auto ms = mean_std(qs);
    means.push_back(ms.mean);
    stds.push_back(ms.std);
  }
  return candidates[argmax_lowest(ucb_scores(means, stds, lambda))];
}

// --- values ---------------------------------------------------------------

Tensor Ensemble::q_values(std::size_t pair, std::size_t i, const Tensor& states, const Tensor& actions,
                          bool target) const {
  const Tensor sa = concat_rows(states, actions);
  const MlpParams& net = target ? targets_.at(pair).at(i) : critics_.at(pair).at(i);
  Tensor q = numcore::mlp_forward(net, sa);
  if (!priors_.empty()) {
    const Tensor f_prior = numcore::mlp_forward(priors_.at(pair).at(i), sa);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] = prior_q(q[j], f_prior[j], config_.flags.prior_beta);
  }
  return q;
}

double Ensemble::q_value(std::size_t pair, std::size_t i, std::span<const double> state,
                         std::span<const double> action, bool target) const {
  return q_values(pair, i, row_tensor(state), row_tensor(action), target)[0];
}

// --- learning -------------------------------------------------------------

TrainTargets Ensemble::compute_targets(const replay::Batch& batch, Rng& rng) const {
  const std::size_t n = batch.size();
  const std::size_t a_dim = config_.action_dim;
  const auto& f = config_.flags;
  std::normal_distribution<double> smooth(0.0, 1.0);
  TrainTargets out;
  for (std::size_t p = 0; p < critic_pairs(); ++p) {
    Tensor raw = actor_outputs(p, batch.next_states);
    Tensor next({n, a_dim});
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<double> mu(raw.data() + r * a_dim, raw.data() + (r + 1) * a_dim);
      if (f.action_normalization) mu = normalize_action(mu);
      for (std::size_t j = 0; j < a_dim; ++j) {
        const double eps = config_.target_noise > 0.0 ? config_.target_noise * smooth(rng) : 0.0;
        next.at(r, j) = config_.max_action * std::tanh(mu[j] + eps);
      }
    }
    const Tensor q1 = q_values(p, 0, batch.next_states, next, true);
    const Tensor q2 = q_values(p, 1, batch.next_states, next, true);
    Tensor y({n, 1});
    for (std::size_t r = 0; r < n; ++r) {
      y[r] = bellman_target(batch.rewards[r], config_.gamma, batch.dones[r] != 0.0, q1[r], q2[r],
                            f.clipped_double_q);
    }
    Tensor w({n, 1}, 1.0);
    if (f.weighted_backup_enabled) {
      std::vector<Tensor> all;
      for (std::size_t pp = 0; pp < critic_pairs(); ++pp) {
        for (std::size_t i = 0; i < 2; ++i) all.push_back(q_values(pp, i, batch.next_states, next, true));
      }
      std::vector<double> qs(all.size());
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < all.size(); ++c) qs[c] = all[c][r];
        w[r] = backup_weight(mean_std(qs).std, f.weighted_backup_eps, f.weighted_backup_temperature);
      }
    }
    out.y.push_back(std::move(y));
    out.weights.push_back(std::move(w));
    out.next_actions.push_back(std::move(next));
  }
  return out;
}

double Ensemble::critic_step(std::size_t p, std::size_t i, const replay::Batch& batch, const Tensor& sa,
                             const Tensor& y, const Tensor& w, double denom) {
  (void)batch;
  MlpParams& net = critics_[p][i];
  Graph g;
  Var x = g.constant_view(sa);
  Var q = numcore::mlp_forward(g, net, x, ParamMode::kTrack);
  if (!priors_.empty()) {
    Tensor prior_out = numcore::mlp_forward(priors_[p][i], sa);
    for (double& v : prior_out.values()) v *= config_.flags.prior_beta;
    q = g.add(q, g.constant(std::move(prior_out)));
  }
  std::optional<double> huber;
  if (config_.flags.huber_loss) huber = config_.flags.huber_delta;
  Var loss = numcore::weighted_regression_loss(g, q, g.constant_view(y), w, huber, denom);
  net.zero_grad();
  g.backward(loss);
  auto params = net.tensors();
  critic_opt_[p][i].apply(params);
  return g.value(loss)[0];
}

double Ensemble::actor_step(std::size_t k, const replay::Batch& batch, double& mean_q) {
  const std::size_t p = pair_of(k);
  MlpParams& net = actors_[k];
  Graph g;
  Var s = g.constant_view(batch.states);
  Var mu = numcore::mlp_forward(g, net, s, ParamMode::kTrack);
  if (config_.flags.action_normalization) mu = g.rescale_rows_mean_abs(mu);
  Var a = g.scale(g.tanh(mu), config_.max_action);
  Var x = g.concat_cols(s, a);
  Var q = numcore::mlp_forward(g, critics_[p][0], x, ParamMode::kFrozen);
  if (!priors_.empty()) {
    q = g.add(q, g.scale(numcore::mlp_forward(g, priors_[p][0], x, ParamMode::kFrozen), config_.flags.prior_beta));
  }
  Var loss;
  if (config_.flags.data_bootstrap_enabled) {
    const Tensor mask = column(batch.masks, k);
    double kept = 0.0;
    for (double m : mask.values()) kept += m;
    loss = g.scale(g.sum(g.mul(q, g.constant(mask))), -1.0 / std::max(kept, 1.0));
  } else {
    loss = g.scale(g.mean(q), -1.0);
  }
  net.zero_grad();
  g.backward(loss);
  auto params = net.tensors();
  actor_opt_[k].apply(params);
  double sum = 0.0;
  for (double v : g.value(q).values()) sum += v;
  mean_q = sum / static_cast<double>(g.value(q).size());
  return g.value(loss)[0];
}

UpdateStats Ensemble::update_step(const replay::Batch& batch) {
  if (batch.size() == 0) throw AgentError("update_step: empty batch");
  const bool bootstrap = config_.flags.data_bootstrap_enabled;
  if (bootstrap && batch.masks.cols() < config_.members) {
    throw AgentError("update_step: data bootstrap needs one mask column per member");
  }
  const TrainTargets targets = compute_targets(batch, train_rng_);
  const Tensor sa = concat_rows(batch.states, batch.actions);
  const double n = static_cast<double>(batch.size());

  UpdateStats stats;
  for (std::size_t p = 0; p < critic_pairs(); ++p) {
    Tensor w = targets.weights[p];
    double denom = n;
    if (bootstrap) {
      const Tensor mask = column(batch.masks, p);
      double kept = 0.0;
      for (std::size_t r = 0; r < mask.size(); ++r) {
        w[r] *= mask[r];
        kept += mask[r];
      }
      denom = std::max(kept, 1.0);
    }
    for (std::size_t i = 0; i < 2; ++i) stats.critic_loss += critic_step(p, i, batch, sa, targets.y[p], w, denom);
  }
  stats.critic_loss /= static_cast<double>(2 * critic_pairs());

  for (std::size_t k = 0; k < config_.members; ++k) {
    double q = 0.0;
    stats.actor_loss += actor_step(k, batch, q);
    stats.mean_q += q;
  }
  stats.actor_loss /= static_cast<double>(config_.members);
  stats.mean_q /= static_cast<double>(config_.members);

  for (std::size_t p = 0; p < critic_pairs(); ++p) {
    for (std::size_t i = 0; i < 2; ++i) numcore::polyak_update(targets_[p][i], critics_[p][i], config_.polyak);
  }
  ++updates_;
  stats.finite = std::isfinite(stats.critic_loss) && std::isfinite(stats.actor_loss) && std::isfinite(stats.mean_q);
  return stats;
}

// --- parameters -----------------------------------------------------------

namespace {

template <typename F>
void for_each_net(const std::vector<MlpParams>& actors, const std::vector<std::array<MlpParams, 2>>& critics,
                  const std::vector<std::array<MlpParams, 2>>& targets,
                  const std::vector<std::array<MlpParams, 2>>& priors, F&& f) {
  for (std::size_t k = 0; k < actors.size(); ++k) f("actor." + std::to_string(k), actors[k]);
  auto pairs = [&](const std::string& name, const std::vector<std::array<MlpParams, 2>>& nets) {
    for (std::size_t p = 0; p < nets.size(); ++p) {
      for (std::size_t i = 0; i < 2; ++i) f(name + "." + std::to_string(p) + "." + std::to_string(i), nets[p][i]);
    }
  };
  pairs("critic", critics);
  pairs("target", targets);
  pairs("prior", priors);
}

}  // namespace

bool Ensemble::parameters_finite() const {
  bool ok = true;
  for_each_net(actors_, critics_, targets_, priors_, [&](const std::string&, const MlpParams& net) {
    for (const Tensor* t : net.tensors()) ok = ok && t->all_finite();
  });
  return ok;
}

std::vector<double> Ensemble::flat_parameters() const {
  std::vector<double> out;
  for_each_net(actors_, critics_, targets_, priors_, [&](const std::string&, const MlpParams& net) {
    for (const Tensor* t : net.tensors()) out.insert(out.end(), t->values().begin(), t->values().end());
  });
  return out;
}

namespace {

json flags_to_json(const VariantFlags& f) {
  return json{{"gaussian_noise_std", f.gaussian_noise_std},
              {"ucb_enabled", f.ucb_enabled},
              {"ucb_lambda", f.ucb_lambda},
              {"weighted_backup_enabled", f.weighted_backup_enabled},
              {"weighted_backup_eps", f.weighted_backup_eps},
              {"weighted_backup_temperature", f.weighted_backup_temperature},
              {"clipped_double_q", f.clipped_double_q},
              {"vote_policy_mode", to_string(f.vote_policy_mode)},
              {"vote_eval", f.vote_eval},
              {"prior_nets_enabled", f.prior_nets_enabled},
              {"prior_beta", f.prior_beta},
              {"data_bootstrap_enabled", f.data_bootstrap_enabled},
              {"bootstrap_probability", f.bootstrap_probability},
              {"single_critic", f.single_critic},
              {"shared_actor_init", f.shared_actor_init},
              {"single_actor_explore", f.single_actor_explore},
              {"single_actor_eval", f.single_actor_eval},
              {"action_normalization", f.action_normalization},
              {"huber_loss", f.huber_loss},
              {"huber_delta", f.huber_delta}};
}

VariantFlags flags_from_json(const json& j) {
  VariantFlags f;
  f.gaussian_noise_std = j.at("gaussian_noise_std");
  f.ucb_enabled = j.at("ucb_enabled");
  f.ucb_lambda = j.at("ucb_lambda");
  f.weighted_backup_enabled = j.at("weighted_backup_enabled");
  f.weighted_backup_eps = j.at("weighted_backup_eps");
  f.weighted_backup_temperature = j.at("weighted_backup_temperature");
  f.clipped_double_q = j.at("clipped_double_q");
  f.vote_policy_mode = parse_vote_mode(j.at("vote_policy_mode"));
  f.vote_eval = j.at("vote_eval");
  f.prior_nets_enabled = j.at("prior_nets_enabled");
  f.prior_beta = j.at("prior_beta");
  f.data_bootstrap_enabled = j.at("data_bootstrap_enabled");
  f.bootstrap_probability = j.at("bootstrap_probability");
  f.single_critic = j.at("single_critic");
  f.shared_actor_init = j.at("shared_actor_init");
  f.single_actor_explore = j.at("single_actor_explore");
  f.single_actor_eval = j.at("single_actor_eval");
  f.action_normalization = j.at("action_normalization");
  f.huber_loss = j.at("huber_loss");
  f.huber_delta = j.at("huber_delta");
  return f;
}

std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void restore_rng(Rng& rng, const std::string& state) {
  std::istringstream is(state);
  is >> rng;
  if (!is) throw AgentError("checkpoint manifest: bad RNG state");
}

}  // namespace

void Ensemble::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<numcore::NamedArray> arrays;
  for_each_net(actors_, critics_, targets_, priors_,
               [&](const std::string& name, const MlpParams& net) { numcore::append_mlp(arrays, name, net); });
  numcore::save_checkpoint(dir / "nets.ckpt", arrays);

  json m{{"format", "ed2-ensemble v1"},
         {"state_dim", config_.state_dim},
         {"action_dim", config_.action_dim},
         {"max_action", config_.max_action},
         {"members", config_.members},
         {"hidden", config_.hidden},
         {"gamma", config_.gamma},
         {"polyak", config_.polyak},
         {"actor_lr", config_.actor_lr},
         {"critic_lr", config_.critic_lr},
         {"target_noise", config_.target_noise},
         {"flags", flags_to_json(config_.flags)},
         {"update_count", updates_},
         {"current_actor", current_},
         {"explore_rng", rng_state(explore_rng_)},
         {"train_rng", rng_state(train_rng_)}};
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << '\n';
  if (!out) throw AgentError("could not write " + (dir / "manifest.json").string());
}

Ensemble Ensemble::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw AgentError("could not read " + (dir / "manifest.json").string());
  const json m = json::parse(in);
  if (m.at("format") != "ed2-ensemble v1") throw AgentError("unsupported checkpoint format");
  AgentConfig c;
  c.state_dim = m.at("state_dim");
  c.action_dim = m.at("action_dim");
  c.max_action = m.at("max_action");
  c.members = m.at("members");
  c.hidden = m.at("hidden").get<std::vector<std::size_t>>();
  c.gamma = m.at("gamma");
  c.polyak = m.at("polyak");
  c.actor_lr = m.at("actor_lr");
  c.critic_lr = m.at("critic_lr");
  c.target_noise = m.at("target_noise");
  c.flags = flags_from_json(m.at("flags"));

  Ensemble e(c, 0);
  const auto arrays = numcore::load_checkpoint(dir / "nets.ckpt");
  for (std::size_t k = 0; k < e.actors_.size(); ++k) numcore::restore_mlp(arrays, "actor." + std::to_string(k), e.actors_[k]);
  auto pairs = [&](const std::string& name, std::vector<std::array<MlpParams, 2>>& nets) {
    for (std::size_t p = 0; p < nets.size(); ++p) {
      for (std::size_t i = 0; i < 2; ++i) {
        numcore::restore_mlp(arrays, name + "." + std::to_string(p) + "." + std::to_string(i), nets[p][i]);
      }
    }
  };
  pairs("critic", e.critics_);
  pairs("target", e.targets_);
  pairs("prior", e.priors_);
  e.updates_ = m.at("update_count");
  e.current_ = m.at("current_actor");
  restore_rng(e.explore_rng_, m.at("explore_rng"));
  restore_rng(e.train_rng_, m.at("train_rng"));
  return e;
}

}  // namespace ed2::agent
