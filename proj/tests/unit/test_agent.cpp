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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "ed2/agent/action.hpp"
#include "ed2/agent/ensemble.hpp"
#include "support/oracles.hpp"
#include "support/random_mlp.hpp"

using namespace ed2;
using namespace ed2::agent;
using ed2::numcore::Tensor;

namespace {

AgentConfig small_config(std::size_t members = 3) {
  AgentConfig c;
  c.state_dim = 3;
  c.action_dim = 2;
  c.max_action = 2.0;
  c.members = members;
  c.hidden = {16, 16};
  return c;
}

replay::Batch random_batch(const AgentConfig& c, std::size_t n, std::uint64_t seed, double done_rate = 0.2) {
  replay::ReplayBuffer buf(n, c.state_dim, c.action_dim,
                           {c.flags.data_bootstrap_enabled ? c.members : 0, c.flags.bootstrap_probability, seed});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::uniform_real_distribution<double> u(-c.max_action, c.max_action);
  std::bernoulli_distribution done(done_rate);
  for (std::size_t i = 0; i < n; ++i) {
    replay::Transition t;
    for (std::size_t j = 0; j < c.state_dim; ++j) t.state.push_back(d(rng));
    for (std::size_t j = 0; j < c.action_dim; ++j) t.action.push_back(u(rng));
    for (std::size_t j = 0; j < c.state_dim; ++j) t.next_state.push_back(d(rng));
    t.reward = d(rng);
    t.done = done(rng);
    buf.store(t);
  }
  replay::Rng sampler(seed + 1);
  return buf.sample_uniform(n, sampler);
}

// Longhand forward of an MLP on one input row.
using ed2::testing::mlp_longhand;

// Makes an actor emit a constant raw output regardless of the state.
void set_constant_output(numcore::MlpParams& net, const std::vector<double>& out) {
  auto& last = net.layers.back();
  for (double& v : last.weight.values()) v = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) last.bias[j] = out[j];
}

std::vector<double> row(const Tensor& m, std::size_t r) {
  return std::vector<double>(m.data() + r * m.cols(), m.data() + (r + 1) * m.cols());
}

double sq_distance(const numcore::MlpParams& a, const numcore::MlpParams& b) {
  double s = 0.0;
  auto ta = a.tensors();
  auto tb = b.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    for (std::size_t j = 0; j < ta[i]->size(); ++j) {
      const double d = (*ta[i])[j] - (*tb[i])[j];
      s += d * d;
    }
  }
  return s;
}

}  // namespace

TEST_SUITE("agent.action") {
  TEST_CASE("normalization examples") {
    const double small[2] = {0.2, -0.2};
    CHECK(normalize_action(small) == std::vector<double>{0.2, -0.2});
    const double big[2] = {3.0, -1.0};
    CHECK(normalize_action(big) == std::vector<double>{1.5, -0.5});
  }

  TEST_CASE("normalized outputs have mean magnitude at most 1 and keep direction") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_real_distribution<double> scale_d(0.01, 100.0);
    std::normal_distribution<double> d(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
      std::vector<double> mu(static_cast<std::size_t>(dim(rng)));
      const double s = scale_d(rng);
      for (double& v : mu) v = s * d(rng);
      const auto out = normalize_action(mu);
      double g = 0.0, m = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        g += std::abs(mu[i]);
        m += std::abs(out[i]);
      }
      g /= static_cast<double>(mu.size());
      m /= static_cast<double>(mu.size());
      CHECK(m <= 1.0 + 1e-12);
      for (std::size_t i = 0; i < mu.size(); ++i) CHECK(out[i] == doctest::Approx(g > 1.0 ? mu[i] / g : mu[i]));
    }
  }

  TEST_CASE("argmax breaks ties toward the lowest index") {
    const double q[2] = {1.0, 0.5};
    CHECK(argmax_lowest(q) == 0);
    const double tie[3] = {0.2, 0.7, 0.7};
    CHECK(argmax_lowest(tie) == 1);
  }

  TEST_CASE("ucb arithmetic") {
    const double means[2] = {1.0, 0.5};
    const double stds[2] = {0.0, 1.0};
    const auto s = ucb_scores(means, stds, 1.0);
    CHECK(s == std::vector<double>{1.0, 1.5});
    CHECK(argmax_lowest(s) == 1);
  }

  TEST_CASE("prior q arithmetic") {
    CHECK(prior_q(0.7, 5.0, 0.0) == 0.7);
    CHECK(prior_q(0.0, -0.5, 2.0) == -1.0);
    CHECK(prior_q(1.5, -0.5, 2.0) == 0.5);
  }

  TEST_CASE("bellman target arithmetic") {
    CHECK(bellman_target(1.0, 0.99, false, 10.0, 12.0, true) == doctest::Approx(10.9).epsilon(1e-14));
    CHECK(bellman_target(1.0, 0.99, false, 10.0, 12.0, false) == doctest::Approx(10.9).epsilon(1e-14));
    CHECK(bellman_target(1.0, 0.99, false, 12.0, 10.0, false) == doctest::Approx(12.88).epsilon(1e-14));
    CHECK(bellman_target(-3.25, 0.99, true, 10.0, 12.0, true) == -3.25);
  }

  TEST_CASE("backup weight range") {
    CHECK(backup_weight(0.0, 0.5, 10.0) == 0.75);
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> d(0.5);
    for (int i = 0; i < 1000; ++i) {
      const double w = backup_weight(d(rng), 0.5, 10.0);
      CHECK(w >= 0.5);
      CHECK(w <= 0.75);
    }
    CHECK(backup_weight(1e-3, 0.5, 10.0) < 0.75);
    CHECK(backup_weight(1e-3, 0.5, 10.0) > 0.5);
  }
}

TEST_SUITE("agent.acting") {
  TEST_CASE("noise-free exploration is deterministic") {
    Ensemble e(small_config(), 4);
    e.begin_episode();
    const double s[3] = {0.1, -0.4, 2.0};
    CHECK(e.explore_action(s) == e.explore_action(s));
  }

  TEST_CASE("zero-weight actor outputs zero") {
    Ensemble e(small_config(1), 4);
    for (Tensor* t : e.actor(0).tensors()) {
      for (double& v : t->values()) v = 0.0;
    }
    e.begin_episode();
    const double s[3] = {5.0, -3.0, 1.0};
    CHECK(e.explore_action(s) == std::vector<double>{0.0, 0.0});
  }

  TEST_CASE("episode actor selection is uniform") {
    Ensemble e(small_config(5), 11);
    std::vector<std::size_t> counts(5, 0);
    for (int ep = 0; ep < 10000; ++ep) ++counts[e.begin_episode()];
    for (auto c : counts) {
      CHECK(c >= 1850);
      CHECK(c <= 2150);
    }
    CHECK(ed2::testing::uniform_chi_square_p(counts) > 0.01);
  }

  TEST_CASE("selection with K=1 and seeded reproducibility") {
    Ensemble one(small_config(1), 2);
    for (int i = 0; i < 50; ++i) CHECK(one.begin_episode() == 0);
    Ensemble e(small_config(5), 2);
    Rng a(8), b(8);
    for (int i = 0; i < 50; ++i) CHECK(e.select_episode_actor(a) == e.select_episode_actor(b));
  }

  TEST_CASE("single actor exploration always picks actor 0") {
    auto c = small_config(5);
    c.flags.single_actor_explore = true;
    Ensemble e(c, 2);
    for (int i = 0; i < 100; ++i) CHECK(e.begin_episode() == 0);
  }

  TEST_CASE("evaluation averages final actions") {
    auto c = small_config(2);
    c.action_dim = 1;
    c.max_action = 1.0;
    Ensemble e(c, 3);
    set_constant_output(e.actor(0), {3.0});
    set_constant_output(e.actor(1), {-3.0});
    const double s[3] = {0.3, 0.3, 0.3};
    CHECK(e.evaluate_action(s)[0] == 0.0);

    c.max_action = 2.0;
    Ensemble f(c, 3);
    set_constant_output(f.actor(0), {std::atanh(0.25)});
    set_constant_output(f.actor(1), {std::atanh(0.5)});
    CHECK(f.member_action(0, s)[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.member_action(1, s)[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.evaluate_action(s)[0] == doctest::Approx(0.75).epsilon(1e-12));
  }

  TEST_CASE("identical actors evaluate to the single-actor action") {
    auto c = small_config(4);
    c.flags.shared_actor_init = true;
    Ensemble e(c, 3);
    const double s[3] = {0.9, -0.1, 0.4};
    const auto single = e.member_action(0, s);
    const auto mean = e.evaluate_action(s);
    for (std::size_t j = 0; j < single.size(); ++j) CHECK(mean[j] == doctest::Approx(single[j]).epsilon(1e-14));
  }

  TEST_CASE("single actor evaluation uses actor 0") {
    auto c = small_config(4);
    c.flags.single_actor_eval = true;
    Ensemble e(c, 3);
    const double s[3] = {0.9, -0.1, 0.4};
    CHECK(e.evaluate_action(s) == e.member_action(0, s));
  }

  TEST_CASE("vote and ucb with one member return that member's action") {
    Ensemble e(small_config(1), 6);
    const double s[3] = {0.2, 0.1, -0.3};
    const auto a = e.member_action(0, s);
    CHECK(e.vote_action(s, VoteMode::kArbitraryCritic) == a);
    CHECK(e.vote_action(s, VoteMode::kEnsembleCritic) == a);
    CHECK(e.ucb_action(s, 1.0) == a);
  }

  TEST_CASE("vote modes agree when all critics are identical") {
    Ensemble e(small_config(4), 6);
    for (std::size_t p = 1; p < 4; ++p) e.critic(p, 0) = e.critic(0, 0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    for (int i = 0; i < 50; ++i) {
      const double s[3] = {d(rng), d(rng), d(rng)};
      e.set_current_actor(static_cast<std::size_t>(i % 4));
      CHECK(e.vote_action(s, VoteMode::kArbitraryCritic) == e.vote_action(s, VoteMode::kEnsembleCritic));
    }
  }

  TEST_CASE("vote picks the candidate its critic scores highest") {
    Ensemble e(small_config(3), 7);
    const double s[3] = {0.5, -0.5, 1.0};
    e.set_current_actor(2);
    std::vector<double> q;
    for (std::size_t k = 0; k < 3; ++k) q.push_back(e.q_value(2, 0, s, e.member_action(k, s)));
    CHECK(e.vote_action(s, VoteMode::kArbitraryCritic) == e.member_action(argmax_lowest(q), s));
  }

  TEST_CASE("ucb with zero bonus is the ensemble-critic vote") {
    Ensemble e(small_config(4), 8);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> d;
    for (int i = 0; i < 50; ++i) {
      const double s[3] = {d(rng), d(rng), d(rng)};
      CHECK(e.ucb_action(s, 0.0) == e.vote_action(s, VoteMode::kEnsembleCritic));
    }
  }

  TEST_CASE("all actions stay within the bound") {
    auto c = small_config(3);
    c.flags.gaussian_noise_std = 0.29;
    Ensemble e(c, 9);
    for (Tensor* t : e.actor(1).tensors()) {
      for (double& v : t->values()) v *= 50.0;
    }
    std::mt19937_64 rng(4);
    std::normal_distribution<double> d(0.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
      if (i % 50 == 0) e.begin_episode();
      const double s[3] = {d(rng), d(rng), d(rng)};
      for (double v : e.explore_action(s)) CHECK(std::abs(v) <= 2.0);
      for (double v : e.evaluate_action(s)) CHECK(std::abs(v) <= 2.0);
    }
  }

  TEST_CASE("shared actor init ties actors but not critics") {
    auto c = small_config(3);
    c.flags.shared_actor_init = true;
    Ensemble shared(c, 10);
    CHECK(sq_distance(shared.actor(0), shared.actor(1)) == 0.0);
    CHECK(sq_distance(shared.actor(0), shared.actor(2)) == 0.0);
    CHECK(sq_distance(shared.critic(0, 0), shared.critic(1, 0)) > 0.0);

    Ensemble plain(small_config(3), 10);
    CHECK(sq_distance(plain.actor(0), plain.actor(1)) > 0.0);
    CHECK(sq_distance(plain.critic(0, 0), plain.critic(0, 1)) > 0.0);
    CHECK(sq_distance(plain.critic(0, 0), plain.critic(1, 0)) > 0.0);
  }

  TEST_CASE("targets start equal to their critics") {
    Ensemble e(small_config(3), 12);
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t i = 0; i < 2; ++i) CHECK(sq_distance(e.critic(p, i), e.target_critic(p, i)) == 0.0);
    }
  }
}

TEST_SUITE("agent.targets") {
  TEST_CASE("targets match the closed form at the returned target actions") {
    auto c = small_config(3);
    Ensemble e(c, 21);
    auto batch = random_batch(c, 200, 5);
    Rng rng(3);
    const auto t = e.compute_targets(batch, rng);
    REQUIRE(t.y.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t r = 0; r < batch.size(); ++r) {
        auto x = row(batch.next_states, r);
        const auto a = row(t.next_actions[k], r);
        x.insert(x.end(), a.begin(), a.end());
        const double q1 = mlp_longhand(e.target_critic(k, 0), x);
        const double q2 = mlp_longhand(e.target_critic(k, 1), x);
        const double expected = batch.dones[r] != 0.0 ? batch.rewards[r]
                                                      : batch.rewards[r] + 0.99 * std::min(q1, q2);
        CHECK(std::abs(t.y[k][r] - expected) <= 1e-12);
        if (batch.dones[r] != 0.0) CHECK(t.y[k][r] == batch.rewards[r]);
        CHECK(t.weights[k][r] == 1.0);
      }
    }
  }

  TEST_CASE("target actions are smoothed around each actor's own output") {
    auto c = small_config(2);
    c.target_noise = 0.0;
    Ensemble e(c, 22);
    auto batch = random_batch(c, 20, 6);
    Rng rng(0);
    const auto t = e.compute_targets(batch, rng);
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t r = 0; r < batch.size(); ++r) {
        const auto expected = e.member_action(k, row(batch.next_states, r));
        const auto got = row(t.next_actions[k], r);
        for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[j] == doctest::Approx(expected[j]).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("constant target critics reproduce the 10.9 example") {
    auto c = small_config(1);
    Ensemble e(c, 23);
    set_constant_output(e.target_critic(0, 0), {10.0});
    set_constant_output(e.target_critic(0, 1), {12.0});
    auto batch = random_batch(c, 10, 7, 0.0);
    for (std::size_t r = 0; r < batch.size(); ++r) batch.rewards[r] = 1.0;
    Rng rng(1);
    const auto t = e.compute_targets(batch, rng);
    for (std::size_t r = 0; r < batch.size(); ++r) CHECK(t.y[0][r] == doctest::Approx(10.9).epsilon(1e-14));
  }

  TEST_CASE("clipped targets never exceed unclipped ones") {
    auto c = small_config(3);
    Ensemble clipped(c, 24);
    c.flags.clipped_double_q = false;
    Ensemble plain(c, 24);
    auto batch = random_batch(c, 300, 8);
    Rng r1(5), r2(5);
    const auto a = clipped.compute_targets(batch, r1);
    const auto b = plain.compute_targets(batch, r2);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t r = 0; r < batch.size(); ++r) CHECK(a.y[k][r] <= b.y[k][r]);
    }
  }

  TEST_CASE("equal target critics make clipping irrelevant") {
    auto c = small_config(2);
    Ensemble clipped(c, 25);
    c.flags.clipped_double_q = false;
    Ensemble plain(c, 25);
    for (Ensemble* e : {&clipped, &plain}) {
      for (std::size_t p = 0; p < 2; ++p) e->critic(p, 1) = e->critic(p, 0);
      e->sync_targets();
    }
    auto batch = random_batch(c, 100, 9);
    Rng r1(5), r2(5);
    const auto a = clipped.compute_targets(batch, r1);
    const auto b = plain.compute_targets(batch, r2);
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t r = 0; r < batch.size(); ++r) CHECK(a.y[k][r] == b.y[k][r]);
    }
  }

  TEST_CASE("weighted backup weights follow the ensemble spread") {
    auto c = small_config(3);
    c.flags.weighted_backup_enabled = true;
    Ensemble e(c, 26);
    auto batch = random_batch(c, 100, 10);
    Rng rng(2);
    const auto t = e.compute_targets(batch, rng);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t r = 0; r < batch.size(); ++r) {
        std::vector<double> qs;
        auto x = row(batch.next_states, r);
        const auto a = row(t.next_actions[k], r);
        x.insert(x.end(), a.begin(), a.end());
        for (std::size_t p = 0; p < 3; ++p) {
          for (std::size_t i = 0; i < 2; ++i) qs.push_back(mlp_longhand(e.target_critic(p, i), x));
        }
        const double mean = ed2::testing::sample_mean(qs);
        double ss = 0.0;
        for (double q : qs) ss += (q - mean) * (q - mean);
        const double sd = std::sqrt(ss / static_cast<double>(qs.size()));
        CHECK(t.weights[k][r] == doctest::Approx(0.5 + 0.5 / (1.0 + std::exp(10.0 * sd))).epsilon(1e-10));
        CHECK(t.weights[k][r] > 0.5);
        CHECK(t.weights[k][r] <= 0.75);
      }
    }
  }

  TEST_CASE("weights hit the ceiling when all target critics agree") {
    auto c = small_config(2);
    c.flags.weighted_backup_enabled = true;
    Ensemble e(c, 27);
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t i = 0; i < 2; ++i) e.critic(p, i) = e.critic(0, 0);
    }
    e.sync_targets();
    auto batch = random_batch(c, 50, 11);
    Rng rng(3);
    const auto t = e.compute_targets(batch, rng);
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t r = 0; r < batch.size(); ++r) CHECK(t.weights[k][r] == doctest::Approx(0.75).epsilon(1e-12));
    }
  }

  TEST_CASE("prior nets shift q by beta times the prior output") {
    auto c = small_config(2);
    c.flags.prior_nets_enabled = true;
    c.flags.prior_beta = 2.0;
    Ensemble e(c, 28);
    const double s[3] = {0.1, 0.2, 0.3};
    const double a[2] = {0.5, -1.0};
    std::vector<double> x{0.1, 0.2, 0.3, 0.5, -1.0};
    const double f = mlp_longhand(e.critic(1, 0), x);
    const double prior = mlp_longhand(e.prior(1, 0), x);
    CHECK(e.q_value(1, 0, s, a) == doctest::Approx(f + 2.0 * prior).epsilon(1e-12));

    c.flags.prior_beta = 0.0;
    Ensemble zero(c, 28);
    CHECK(zero.q_value(1, 0, s, a) == doctest::Approx(mlp_longhand(zero.critic(1, 0), x)).epsilon(1e-12));
  }
}

TEST_SUITE("agent.update") {
  TEST_CASE("zero learning rate leaves mains unchanged with finite losses") {
    auto c = small_config(3);
    c.actor_lr = 0.0;
    c.critic_lr = 0.0;
    Ensemble e(c, 31);
    const auto actor = e.actor(2);
    const auto critic = e.critic(1, 1);
    auto batch = random_batch(c, 64, 12);
    const auto stats = e.update_step(batch);
    CHECK(stats.finite);
    CHECK(std::isfinite(stats.critic_loss));
    CHECK(sq_distance(e.actor(2), actor) == 0.0);
    CHECK(sq_distance(e.critic(1, 1), critic) == 0.0);
    CHECK(e.update_count() == 1);
  }

  TEST_CASE("one update lowers the critic loss on a frozen batch") {
    auto c = small_config(3);
    c.target_noise = 0.0;
    Ensemble e(c, 32);
    auto batch = random_batch(c, 256, 13);
    Rng rng(0);
    const auto targets = e.compute_targets(batch, rng);
    auto loss = [&](std::size_t p, std::size_t i) {
      const Tensor q = e.q_values(p, i, batch.states, batch.actions, false);
      double s = 0.0;
      for (std::size_t r = 0; r < batch.size(); ++r) s += (q[r] - targets.y[p][r]) * (q[r] - targets.y[p][r]);
      return s / static_cast<double>(batch.size());
    };
    std::vector<double> before;
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t i = 0; i < 2; ++i) before.push_back(loss(p, i));
    }
    e.update_step(batch);
    std::size_t j = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t i = 0; i < 2; ++i) CHECK(loss(p, i) < before[j++]);
    }
  }

  TEST_CASE("actor update raises its own critic's value") {
    auto c = small_config(2);
    c.critic_lr = 0.0;
    Ensemble e(c, 33);
    auto batch = random_batch(c, 256, 14);
    auto value = [&](std::size_t k) {
      double s = 0.0;
      for (std::size_t r = 0; r < batch.size(); ++r) {
        s += e.q_value(k, 0, row(batch.states, r), e.member_action(k, row(batch.states, r)));
      }
      return s;
    };
    const double v0 = value(0), v1 = value(1);
    e.update_step(batch);
    CHECK(value(0) > v0);
    CHECK(value(1) > v1);
  }

  TEST_CASE("single critic: one pair serves every actor") {
    auto c = small_config(4);
    c.flags.single_critic = true;
    Ensemble e(c, 34);
    CHECK(e.critic_pairs() == 1);
    for (std::size_t k = 0; k < 4; ++k) CHECK(e.pair_of(k) == 0);
    const auto before = e.flat_parameters();
    auto batch = random_batch(c, 64, 15);
    CHECK(e.update_step(batch).finite);
    CHECK(e.flat_parameters() != before);
    Rng rng(0);
    CHECK(e.compute_targets(batch, rng).y.size() == 1);
  }

  TEST_CASE("a member whose masks are all zero does not learn") {
    auto c = small_config(2);
    c.flags.data_bootstrap_enabled = true;
    Ensemble e(c, 35);
    auto batch = random_batch(c, 64, 16);
    for (std::size_t r = 0; r < batch.size(); ++r) {
      batch.masks.at(r, 0) = 1.0;
      batch.masks.at(r, 1) = 0.0;
    }
    const auto actor0 = e.actor(0);
    const auto actor1 = e.actor(1);
    const auto critic1 = e.critic(1, 0);
    e.update_step(batch);
    CHECK(sq_distance(e.actor(0), actor0) > 0.0);
    CHECK(sq_distance(e.actor(1), actor1) == 0.0);
    CHECK(sq_distance(e.critic(1, 0), critic1) == 0.0);
  }

  TEST_CASE("bootstrap without masks is rejected") {
    auto c = small_config(2);
    c.flags.data_bootstrap_enabled = true;
    Ensemble e(c, 36);
    auto plain = c;
    plain.flags.data_bootstrap_enabled = false;
    auto batch = random_batch(plain, 16, 17);
    CHECK_THROWS_AS(e.update_step(batch), AgentError);
  }

  TEST_CASE("targets drift toward frozen mains by rho per step") {
    auto c = small_config(2);
    c.actor_lr = 0.0;
    c.critic_lr = 0.0;
    Ensemble e(c, 37);
    for (Tensor* t : e.target_critic(1, 0).tensors()) {
      for (double& v : t->values()) v += 0.3;
    }
    const double d0 = std::sqrt(sq_distance(e.critic(1, 0), e.target_critic(1, 0)));
    auto batch = random_batch(c, 32, 18);
    const int n = 25;
    for (int i = 0; i < n; ++i) e.update_step(batch);
    const double dn = std::sqrt(sq_distance(e.critic(1, 0), e.target_critic(1, 0)));
    CHECK(dn / d0 == doctest::Approx(std::pow(0.995, n)).epsilon(1e-9));
  }

  TEST_CASE("identical seeds give bitwise identical trajectories") {
    for (int variant = 0; variant < 3; ++variant) {
      auto c = small_config(3);
      if (variant == 1) c.flags.weighted_backup_enabled = true;
      if (variant == 2) {
        c.flags.prior_nets_enabled = true;
        c.flags.huber_loss = true;
      }
      Ensemble a(c, 40), b(c, 40);
      for (int i = 0; i < 5; ++i) {
        auto batch = random_batch(c, 32, 100 + static_cast<std::uint64_t>(i));
        const auto sa = a.update_step(batch);
        const auto sb = b.update_step(batch);
        CHECK(sa.critic_loss == sb.critic_loss);
      }
      CAPTURE(variant);
      CHECK(a.flat_parameters() == b.flat_parameters());
    }
  }

  TEST_CASE("every variant flag trains without NaNs") {
    std::vector<VariantFlags> variants(12);
    variants[0].ucb_enabled = true;
    variants[1].weighted_backup_enabled = true;
    variants[2].clipped_double_q = false;
    variants[3].vote_policy_mode = VoteMode::kArbitraryCritic;
    variants[4].vote_policy_mode = VoteMode::kEnsembleCritic;
    variants[5].prior_nets_enabled = true;
    variants[6].data_bootstrap_enabled = true;
    variants[7].single_critic = true;
    variants[8].shared_actor_init = true;
    variants[9].single_actor_explore = true;
    variants[9].gaussian_noise_std = 0.29;
    variants[10].single_actor_eval = true;
    variants[11].huber_loss = true;
    variants[11].action_normalization = false;
    for (const auto& flags : variants) {
      auto c = small_config(3);
      c.flags = flags;
      Ensemble e(c, 41);
      e.begin_episode();
      for (int i = 0; i < 10; ++i) {
        auto batch = random_batch(c, 32, 200 + static_cast<std::uint64_t>(i));
        CHECK(e.update_step(batch).finite);
      }
      CHECK(e.parameters_finite());
      const double s[3] = {0.1, 0.2, 0.3};
      for (double v : e.explore_action(s)) CHECK(std::isfinite(v));
    }
  }
}

TEST_SUITE("agent.checkpoint") {
  TEST_CASE("save and load restore every network and stream") {
    auto c = small_config(3);
    c.flags.prior_nets_enabled = true;
    c.flags.gaussian_noise_std = 0.1;
    Ensemble e(c, 50);
    auto batch = random_batch(c, 32, 19);
    e.update_step(batch);
    e.begin_episode();
    const auto dir = std::filesystem::temp_directory_path() / "ed2_agent_ckpt_test";
    std::filesystem::remove_all(dir);
    e.save(dir);
    Ensemble back = Ensemble::load(dir);
    CHECK(back.flat_parameters() == e.flat_parameters());
    CHECK(back.update_count() == 1);
    CHECK(back.current_actor() == e.current_actor());
    CHECK(back.config().flags.gaussian_noise_std == 0.1);
    const double s[3] = {0.4, 0.1, -0.2};
    for (int i = 0; i < 5; ++i) {
      CHECK(back.begin_episode() == e.begin_episode());
      CHECK(back.explore_action(s) == e.explore_action(s));
    }
    std::filesystem::remove_all(dir);
  }
}
