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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ed2/envs/factory.hpp"
#include "ed2/envs/normalizer.hpp"
#include "ed2/envs/tasks.hpp"
#include "ed2/envs/wrappers.hpp"

using namespace ed2::envs;

namespace {

std::vector<double> random_action(const EnvSpec& spec, std::mt19937_64& rng, double overshoot = 1.5) {
  std::uniform_real_distribution<double> u(-overshoot * spec.max_action, overshoot * spec.max_action);
  std::vector<double> a(spec.action_dim);
  for (double& v : a) v = u(rng);
  return a;
}

}  // namespace

TEST_SUITE("envs.reset") {
  TEST_CASE("zero noise always returns the nominal state") {
    PointMassOptions o;
    o.init_noise_scale = 0.0;
    PointMassRunner env(o);
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
      auto s = env.reset(seed);
      for (double v : s) CHECK(v == 0.0);
    }
    PendulumOptions po;
    po.init_noise_scale = 0.0;
    Pendulum p(po);
    p.reset(5);
    CHECK(p.internal_state()[0] == std::numbers::pi);
    CHECK(p.internal_state()[1] == 0.0);
  }

  TEST_CASE("same seed gives the same initial state") {
    for (const auto& name : known_env_names()) {
      auto a = make_env(name);
      auto b = make_env(name);
      CHECK(a->reset(1234) == b->reset(1234));
      CHECK(a->reset(1) != a->reset(2));
    }
  }

  TEST_CASE("perturbation mean is within 3 standard errors of nominal") {
    PointMassRunner env;
    const int n = 1000;
    std::vector<double> sum(4, 0.0);
    for (int i = 0; i < n; ++i) {
      auto s = env.reset(static_cast<std::uint64_t>(i));
      for (std::size_t k = 0; k < 4; ++k) sum[k] += s[k];
    }
    // uniform(-0.1, 0.1): sd = 0.1 / sqrt(3)
    const double se = 0.1 / std::sqrt(3.0) / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(sum[k] / n) < 3.0 * se);
  }

  TEST_CASE("reset clears the step counter") {
    Pendulum env;
    env.reset(0);
    const double u[1] = {0.0};
    for (int i = 0; i < 5; ++i) env.step(u);
    CHECK(env.elapsed_steps() == 5);
    env.reset(0);
    CHECK(env.elapsed_steps() == 0);
  }
}

TEST_SUITE("envs.step") {
  TEST_CASE("pendulum upright with no torque stays upright at zero reward") {
    Pendulum env;
    env.reset(0);
    const double upright[2] = {0.0, 0.0};
    env.set_internal_state(upright);
    const double u[1] = {0.0};
    for (int i = 0; i < 10; ++i) {
      auto r = env.step(u);
      CHECK(r.reward == 0.0);
      CHECK(r.next_state == std::vector<double>{1.0, 0.0, 0.0});
    }
  }

  TEST_CASE("pendulum reward and one hand-computed step") {
    Pendulum env;
    env.reset(0);
    const double s0[2] = {0.5, -1.0};
    env.set_internal_state(s0);
    const double u[1] = {1.0};
    auto r = env.step(u);
    CHECK(r.reward == doctest::Approx(-(0.25 + 0.1 * 1.0 + 0.001)));
    const double omega = -1.0 + (15.0 * std::sin(0.5) + 3.0) * 0.05;
    CHECK(env.internal_state()[1] == doctest::Approx(omega));
    CHECK(env.internal_state()[0] == doctest::Approx(0.5 + omega * 0.05));
    CHECK_FALSE(r.done);
  }

  TEST_CASE("pendulum truncates at T=200 and is never terminal") {
    Pendulum env;
    env.reset(3);
    const double u[1] = {2.0};
    for (int t = 1; t <= 200; ++t) {
      auto r = env.step(u);
      CHECK_FALSE(r.done);
      CHECK(r.truncated == (t == 200));
      CHECK(std::abs(r.next_state[2]) <= 8.0);
    }
  }

  TEST_CASE("point mass with unit x velocity advances by dt and earns 1") {
    PointMassRunner env;
    env.reset(0);
    const double s0[4] = {0.0, 0.0, 1.0, 0.0};
    env.set_internal_state(s0);
    const double u[2] = {0.0, 0.0};
    auto r = env.step(u);
    CHECK(r.reward == 1.0);
    CHECK(r.progress_reward == 1.0);
    CHECK(env.internal_state()[0] == doctest::Approx(0.05));
  }

  TEST_CASE("point mass pays quadratic control cost") {
    PointMassRunner env;
    env.reset(0);
    const double s0[4] = {0.0, 0.0, 0.0, 0.0};
    env.set_internal_state(s0);
    const double u[2] = {0.5, -1.0};
    auto r = env.step(u);
    CHECK(r.reward == doctest::Approx(-0.001 * 1.25));
  }

  TEST_CASE("rings reward counts containing circles") {
    RingsOptions o;
    o.stacks = {CircleStack{{4.0, 0.0}, {3.0, 2.0, 1.0}}};
    Rings env(o);
    CHECK(env.circles_containing(0.0, 0.0) == 0);
    CHECK(env.circles_containing(4.0, 0.0) == 3);
    CHECK(env.circles_containing(1.5, 0.0) == 1);

    env.reset(0);
    const double at_center[4] = {4.0, 0.0, 0.0, 0.0};
    env.set_internal_state(at_center);
    const double u[2] = {0.0, 0.0};
    auto r = env.step(u);
    CHECK(r.reward == 3.0);
    CHECK(r.success);
    const double at_origin[4] = {0.0, 0.0, 0.0, 0.0};
    env.set_internal_state(at_origin);
    r = env.step(u);
    CHECK(r.reward == 0.0);
    CHECK_FALSE(r.success);
  }

  TEST_CASE("default rings has two stacks of three circles") {
    Rings env;
    CHECK(env.circles_containing(4.0, 0.0) == 3);
    CHECK(env.circles_containing(-4.0, 0.0) == 3);
    CHECK(env.circles_containing(0.0, 3.0) == 0);
  }

  TEST_CASE("NaN action is rejected, wrong arity is rejected") {
    Pendulum env;
    env.reset(0);
    const double nan[1] = {std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(env.step(nan), EnvError);
    const double two[2] = {0.0, 0.0};
    CHECK_THROWS_AS(env.step(two), EnvError);
  }

  TEST_CASE("actions beyond M act exactly like M") {
    for (const auto& name : known_env_names()) {
      auto a = make_env(name);
      auto b = make_env(name);
      a->reset(8);
      b->reset(8);
      const double m = a->spec().max_action;
      std::vector<double> big(a->spec().action_dim, 50.0 * m);
      std::vector<double> cap(a->spec().action_dim, m);
      for (int t = 0; t < 20; ++t) {
        auto ra = a->step(big);
        auto rb = b->step(cap);
        CHECK(ra.next_state == rb.next_state);
        CHECK(ra.reward == rb.reward);
      }
    }
  }

  TEST_CASE("rollouts are deterministic given seed and actions") {
    std::mt19937_64 rng(17);
    for (const auto& name : known_env_names()) {
      auto a = make_env(name);
      auto b = make_env(name);
      CHECK(a->reset(42) == b->reset(42));
      for (int t = 0; t < 100; ++t) {
        auto act = random_action(a->spec(), rng);
        auto ra = a->step(act);
        auto rb = b->step(act);
        CHECK(ra.next_state == rb.next_state);
        CHECK(ra.reward == rb.reward);
      }
    }
  }
}

TEST_SUITE("envs.delayed") {
  TEST_CASE("zero raw rewards give zero emissions") {
    RingsOptions o = RingsOptions::defaults();
    o.body.init_noise_scale = 0.0;
    auto env = wrap_delayed(std::make_unique<Rings>(o), 10);
    env->reset(0);
    const double u[2] = {0.0, 0.0};
    for (int t = 0; t < 300; ++t) CHECK(env->step(u).reward == 0.0);
  }

  TEST_CASE("unit rewards are released as 10 every 10th step") {
    RingsOptions o;
    o.stacks = {CircleStack{{0.0, 0.0}, {100.0}}};
    o.body.init_noise_scale = 0.0;
    o.body.episode_length = 35;
    auto env = wrap_delayed(std::make_unique<Rings>(o), 10);
    env->reset(0);
    const double u[2] = {0.0, 0.0};
    for (int t = 1; t <= 35; ++t) {
      auto r = env->step(u);
      if (t == 35) {
        CHECK(r.reward == 5.0);  // flushed at truncation
      } else if (t % 10 == 0) {
        CHECK(r.reward == 10.0);
      } else {
        CHECK(r.reward == 0.0);
      }
    }
  }

  TEST_CASE("episode sums are conserved exactly") {
    std::mt19937_64 rng(5);
    for (const auto& name : known_env_names()) {
      auto raw = make_env(name);
      auto delayed = make_env(name, {"delayed:10"});
      for (int ep = 0; ep < 5; ++ep) {
        raw->reset(static_cast<std::uint64_t>(ep));
        delayed->reset(static_cast<std::uint64_t>(ep));
        double raw_sum = 0.0, emitted_sum = 0.0;
        for (;;) {
          auto a = random_action(raw->spec(), rng);
          auto r1 = raw->step(a);
          auto r2 = delayed->step(a);
          raw_sum += r1.reward;
          emitted_sum += r2.reward;
          if (r1.done || r1.truncated) break;
        }
        CHECK(emitted_sum == raw_sum);
      }
    }
  }
}

TEST_SUITE("envs.sparse") {
  TEST_CASE("closed gate withholds only forward progress") {
    auto raw = make_env("pointmass", {}, EnvOptions{0.0, std::nullopt});
    auto env = make_env("pointmass", {"sparse:1.0"}, EnvOptions{0.0, std::nullopt});
    raw->reset(0);
    env->reset(0);
    // Push forward then backward; x stays below the threshold throughout.
    for (int t = 0; t < 60; ++t) {
      const double u[2] = {t < 20 ? 0.5 : -0.5, 0.3};
      auto r_raw = raw->step(u);
      auto r = env->step(u);
      CHECK(raw->progress_coordinate().value() < 1.0);
      CHECK(r.reward == doctest::Approx(r_raw.reward - std::max(r_raw.progress_reward, 0.0)).epsilon(1e-12));
      CHECK_FALSE(r.success);
    }
  }

  TEST_CASE("starting beyond the threshold makes the wrapper an identity") {
    auto raw = make_env("pointmass", {}, EnvOptions{0.0, std::nullopt});
    auto sparse = make_env("pointmass", {"sparse:1.0"}, EnvOptions{0.0, std::nullopt});
    raw->reset(0);
    sparse->reset(0);
    const double start[4] = {1.5, 0.0, 0.3, 0.0};
    raw->set_internal_state(start);
    sparse->set_internal_state(start);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
      auto a = random_action(raw->spec(), rng);
      CHECK(raw->step(a).reward == sparse->step(a).reward);
    }
  }

  TEST_CASE("scripted crossing at step 17") {
    auto raw = make_env("pointmass", {}, EnvOptions{0.0, std::nullopt});
    auto sparse = make_env("pointmass", {"sparse:1.0"}, EnvOptions{0.0, std::nullopt});
    raw->reset(0);
    sparse->reset(0);
    // Holding u = v = 1 keeps velocity constant, so x grows by 0.05 per step
    // and first exceeds 1.0 after step 17.
    const double start[4] = {0.175, 0.0, 1.0, 0.0};
    raw->set_internal_state(start);
    sparse->set_internal_state(start);
    const double u[2] = {1.0, 0.0};
    for (int t = 1; t <= 40; ++t) {
      auto r1 = raw->step(u);
      auto r2 = sparse->step(u);
      if (t < 17) {
        CHECK(r2.reward < r1.reward);
        CHECK(r2.reward == doctest::Approx(-0.001).epsilon(1e-9));
      } else {
        CHECK(r2.reward == r1.reward);
        CHECK(r2.success);
      }
    }
  }

  TEST_CASE("gated reward never exceeds the raw reward") {
    auto raw = make_env("pointmass");
    auto sparse = make_env("pointmass", {"sparse:1.0"});
    std::mt19937_64 rng(9);
    for (int ep = 0; ep < 10; ++ep) {
      raw->reset(static_cast<std::uint64_t>(ep));
      sparse->reset(static_cast<std::uint64_t>(ep));
      for (int t = 0; t < 300; ++t) {
        auto a = random_action(raw->spec(), rng, 1.0);
        CHECK(sparse->step(a).reward <= raw->step(a).reward);
      }
    }
  }

  TEST_CASE("environments without a progress coordinate are rejected") {
    CHECK_THROWS_AS(make_env("pendulum", {"sparse"}), EnvError);
    CHECK_THROWS_AS(make_env("rings", {"sparse:2"}), EnvError);
  }
}

TEST_SUITE("envs.normalizer") {
  TEST_CASE("constant stream normalizes to zero") {
    RunningNormalizer n(2);
    const double c[2] = {3.5, -1.0};
    for (int i = 0; i < 5; ++i) {
      n.update(c);
      auto out = n.apply(c);
      CHECK(out[0] == 0.0);
      CHECK(out[1] == 0.0);
    }
  }

  TEST_CASE("two-point stream {0, 2}") {
    RunningNormalizer n(1);
    const double a[1] = {0.0}, b[1] = {2.0};
    n.update(a);
    n.update(b);
    CHECK(n.mean()[0] == 1.0);
    CHECK(n.stddev(0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(n.apply(b)[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  }

  TEST_CASE("positive affine transforms of the stream give the same outputs") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> d(0.0, 3.0);
    RunningNormalizer plain(1), moved(1);
    const double scale = 4.5, shift = -12.0;
    for (int i = 0; i < 500; ++i) {
      const double x[1] = {d(rng)};
      const double y[1] = {scale * x[0] + shift};
      plain.update(x);
      moved.update(y);
      if (i >= 1) CHECK(moved.apply(y)[0] == doctest::Approx(plain.apply(x)[0]).epsilon(1e-8));
    }
  }

  TEST_CASE("dimension mismatch is rejected") {
    RunningNormalizer n(3);
    const double x[2] = {1.0, 2.0};
    CHECK_THROWS_AS(n.update(x), EnvError);
  }

  TEST_CASE("observation normalizer evaluation copy does not learn") {
    auto env = make_env("pointmass", {"obs_norm"});
    env->reset(0);
    auto eval = env->evaluation_copy();
    const auto& stats = dynamic_cast<const ObservationNormalizer&>(*env).stats();
    const auto before = stats.count();
    eval->reset(1);
    const double u[2] = {0.1, 0.1};
    eval->step(u);
    CHECK(stats.count() == before);
    env->step(u);
    CHECK(stats.count() == before + 1);
  }

  TEST_CASE("reward normalizer is dropped from evaluation copies") {
    auto env = make_env("pendulum", {"rew_norm"});
    auto eval = env->evaluation_copy();
    CHECK(dynamic_cast<RewardNormalizer*>(eval.get()) == nullptr);
  }
}

TEST_SUITE("envs.factory") {
  TEST_CASE("wrapper list parsing") {
    CHECK(parse_wrapper_list("") == std::vector<std::string>{});
    CHECK(parse_wrapper_list(" delayed:10 , sparse:1.0,obs_norm") ==
          std::vector<std::string>{"delayed:10", "sparse:1.0", "obs_norm"});
  }

  TEST_CASE("unknown names and bad orders are rejected") {
    CHECK_THROWS_AS(make_env("humanoid"), EnvError);
    CHECK_THROWS_AS(make_env("pendulum", {"bogus"}), EnvError);
    CHECK_THROWS_AS(make_env("pendulum", {"delayed:x"}), EnvError);
    CHECK_THROWS_AS(make_env("pointmass", {"delayed", "sparse"}), EnvError);
    CHECK_THROWS_AS(make_env("pendulum", {"rew_norm", "delayed"}), EnvError);
    CHECK_NOTHROW(make_env("pointmass", {"sparse:1.0", "delayed:10", "obs_norm", "rew_norm"}));
  }

  TEST_CASE("episode length override") {
    auto env = make_env("pendulum", {}, EnvOptions{1.0, 7});
    CHECK(env->spec().episode_length == 7);
  }
}
