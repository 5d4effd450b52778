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

#include "ed2/envs/factory.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "ed2/envs/tasks.hpp"
#include "ed2/envs/wrappers.hpp"

namespace ed2::envs {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_double(const std::string& text, const std::string& entry) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw EnvError("wrapper '" + entry + "': bad number '" + text + "'");
  }
}

std::size_t parse_count(const std::string& text, const std::string& entry) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw EnvError("wrapper '" + entry + "': bad count '" + text + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> parse_wrapper_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string::npos ? text.size() : comma;
    std::string entry = trim(text.substr(start, end - start));
    if (!entry.empty()) out.push_back(std::move(entry));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> known_env_names() { return {"pendulum", "pointmass", "rings"}; }

std::unique_ptr<Env> make_env(const std::string& name, const std::vector<std::string>& wrappers,
                              const EnvOptions& options) {
  std::unique_ptr<Env> env;
  if (name == "pendulum") {
    PendulumOptions o;
    o.init_noise_scale = options.init_noise_scale;
    if (options.episode_length) o.episode_length = *options.episode_length;
    env = std::make_unique<Pendulum>(o);
  } else if (name == "pointmass") {
    PointMassOptions o;
    o.init_noise_scale = options.init_noise_scale;
    if (options.episode_length) o.episode_length = *options.episode_length;
    env = std::make_unique<PointMassRunner>(o);
  } else if (name == "rings") {
    auto o = RingsOptions::defaults();
    o.body.init_noise_scale = options.init_noise_scale;
    if (options.episode_length) o.body.episode_length = *options.episode_length;
    env = std::make_unique<Rings>(o);
  } else {
    throw EnvError("unknown environment '" + name + "' (expected pendulum, pointmass or rings)");
  }

  bool reward_rescaled = false;
  bool reward_delayed = false;
  for (const auto& entry : wrappers) {
    const auto colon = entry.find(':');
    const std::string kind = entry.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : entry.substr(colon + 1);
    if (kind == "delayed") {
      if (reward_rescaled) throw EnvError("wrapper 'delayed' must come before 'rew_norm'");
      env = wrap_delayed(std::move(env), arg.empty() ? 10 : parse_count(arg, entry));
      reward_delayed = true;
    } else if (kind == "sparse") {
      if (reward_rescaled || reward_delayed) {
        throw EnvError("wrapper 'sparse' must come before 'delayed' and 'rew_norm'");
      }
      env = wrap_sparse(std::move(env), arg.empty() ? 1.0 : parse_double(arg, entry));
    } else if (kind == "obs_norm" && arg.empty()) {
      env = std::make_unique<ObservationNormalizer>(std::move(env));
    } else if (kind == "rew_norm" && arg.empty()) {
      env = std::make_unique<RewardNormalizer>(std::move(env));
      reward_rescaled = true;
    } else {
      throw EnvError("unknown wrapper '" + entry + "'");
    }
  }
  return env;
}

}  // namespace ed2::envs
