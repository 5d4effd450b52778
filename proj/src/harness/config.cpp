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

#include "ed2/harness/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

#include "ed2/envs/factory.hpp"

namespace ed2::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Shortest text that reads back to the same double.
std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw HarnessError("config: bad value '" + value + "' for " + key);
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') bad_value(key, v);
  return d;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  if (v.empty() || v[0] == '-') bad_value(key, v);
  char* end = nullptr;
  if (v.find_first_not_of("0123456789") == std::string::npos) {
    errno = 0;
    const auto u = std::strtoull(v.c_str(), &end, 10);
    if (errno == ERANGE) bad_value(key, v);
    return u;
  }
  // Accept "1e5" style sizes as long as they are whole numbers.
  const double d = std::strtod(v.c_str(), &end);
  if (*end != '\0' || d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d))) bad_value(key, v);
  return static_cast<std::uint64_t>(d);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  bad_value(key, v);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

template <typename T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, double>) {
    return format_double(v);
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, agent::VoteMode>) {
    return agent::to_string(v);
  } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
    return join(v);
  } else if constexpr (std::is_same_v<T, std::vector<std::uint64_t>>) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
  } else {
    return std::to_string(v);
  }
}

template <typename T>
void parse_value(const std::string& key, const std::string& text, T& out) {
  if constexpr (std::is_same_v<T, bool>) {
    out = parse_bool(key, text);
  } else if constexpr (std::is_same_v<T, double>) {
    out = parse_double(key, text);
  } else if constexpr (std::is_same_v<T, std::string>) {
    out = text;
  } else if constexpr (std::is_same_v<T, agent::VoteMode>) {
    try {
      out = agent::parse_vote_mode(text);
    } catch (const std::exception&) {
      bad_value(key, text);
    }
  } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
    out = envs::parse_wrapper_list(text);
  } else if constexpr (std::is_same_v<T, std::vector<std::uint64_t>>) {
    out = parse_seed_list(text);
  } else {
    out = static_cast<T>(parse_unsigned(key, text));
  }
}

struct Field {
  std::string key;
  bool hashed;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename Access>
Field field(std::string key, Access access, bool hashed = true) {
  return Field{key, hashed,
               [access](const ExperimentConfig& c) { return format_value(access(const_cast<ExperimentConfig&>(c))); },
               [access, key](ExperimentConfig& c, const std::string& v) { parse_value(key, v, access(c)); }};
}

#define ED2_FIELD(name) field(#name, [](ExperimentConfig& c) -> auto& { return c.name; })
#define ED2_FLAG(name) field(#name, [](ExperimentConfig& c) -> auto& { return c.flags.name; })

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      field("variant", [](ExperimentConfig& c) -> auto& { return c.variant; }, false),
      ED2_FIELD(env),
      ED2_FIELD(wrappers),
      ED2_FIELD(episode_length),
      ED2_FIELD(init_noise_scale),
      ED2_FIELD(members),
      ED2_FIELD(hidden_width),
      ED2_FIELD(hidden_layers),
      ED2_FIELD(gamma),
      ED2_FIELD(polyak),
      ED2_FIELD(actor_lr),
      ED2_FIELD(critic_lr),
      ED2_FIELD(target_noise),
      ED2_FIELD(batch_size),
      ED2_FIELD(buffer_size),
      ED2_FIELD(update_interval),
      ED2_FIELD(updates_per_burst),
      ED2_FIELD(ere_enabled),
      ED2_FIELD(ere_eta0),
      ED2_FIELD(warmup_steps),
      ED2_FIELD(total_steps),
      ED2_FIELD(eval_every),
      ED2_FIELD(eval_episodes),
      ED2_FIELD(member_eval),
      ED2_FIELD(stop_when_solved),
      ED2_FLAG(gaussian_noise_std),
      ED2_FLAG(ucb_enabled),
      ED2_FLAG(ucb_lambda),
      ED2_FLAG(weighted_backup_enabled),
      ED2_FLAG(weighted_backup_eps),
      ED2_FLAG(weighted_backup_temperature),
      ED2_FLAG(clipped_double_q),
      ED2_FLAG(vote_policy_mode),
      ED2_FLAG(vote_eval),
      ED2_FLAG(prior_nets_enabled),
      ED2_FLAG(prior_beta),
      ED2_FLAG(data_bootstrap_enabled),
      ED2_FLAG(bootstrap_probability),
      ED2_FLAG(single_critic),
      ED2_FLAG(shared_actor_init),
      ED2_FLAG(single_actor_explore),
      ED2_FLAG(single_actor_eval),
      ED2_FLAG(action_normalization),
      ED2_FLAG(huber_loss),
      ED2_FLAG(huber_delta),
      field("seeds", [](ExperimentConfig& c) -> auto& { return c.seeds; }, false),
  };
  return all;
}

#undef ED2_FIELD
#undef ED2_FLAG

}  // namespace

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw HarnessError("config: " + what);
  };
  require(!env.empty(), "env is empty");
  require(init_noise_scale >= 0.0, "init_noise_scale must be non-negative");
  require(hidden_width > 0 && hidden_layers > 0, "hidden_width and hidden_layers must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(buffer_size > 0, "buffer_size must be positive");
  require(update_interval > 0, "update_interval must be positive");
  require(eval_every > 0, "eval_every must be positive");
  require(eval_episodes >= 2, "eval_episodes must be at least 2");
  require(ere_eta0 > 0.0 && ere_eta0 <= 1.0, "ere_eta0 must be in (0, 1]");
  require(!seeds.empty(), "seed list is empty");
  try {
    agent_config(1, 1, 1.0).validate();
  } catch (const agent::AgentError& e) {
    throw HarnessError(std::string("config: ") + e.what());
  }
}

agent::AgentConfig ExperimentConfig::agent_config(std::size_t state_dim, std::size_t action_dim,
                                                  double max_action) const {
  agent::AgentConfig a;
  a.state_dim = state_dim;
  a.action_dim = action_dim;
  a.max_action = max_action;
  a.members = members;
  a.hidden.assign(hidden_layers, hidden_width);
  a.gamma = gamma;
  a.polyak = polyak;
  a.actor_lr = actor_lr;
  a.critic_lr = critic_lr;
  a.target_noise = target_noise;
  a.flags = flags;
  return a;
}

ExperimentConfig paper_scale(ExperimentConfig config) {
  config.buffer_size = 1000000;
  config.hidden_width = 256;
  config.hidden_layers = 2;
  config.total_steps = 3000000;
  config.eval_every = 10000;
  config.eval_episodes = 30;
  return config;
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

void set_field(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(config, trim(value));
      return;
    }
  }
  throw HarnessError("config: unknown key '" + key + "'");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.push_back(f.key);
  return keys;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw HarnessError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    set_field(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Field& f : fields()) {
    if (!f.hashed) continue;
    for (unsigned char ch : f.key + "=" + f.get(config) + "\n") {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  const std::string t = trim(text);
  std::vector<std::uint64_t> seeds;
  const auto dots = t.find("..");
  if (dots != std::string::npos) {
    const auto a = parse_unsigned("seeds", trim(t.substr(0, dots)));
    const auto b = parse_unsigned("seeds", trim(t.substr(dots + 2)));
    if (b < a) bad_value("seeds", text);
    for (auto s = a; s <= b; ++s) seeds.push_back(s);
    return seeds;
  }
  std::istringstream in(t);
  std::string part;
  while (std::getline(in, part, ',')) {
    part = trim(part);
    if (!part.empty()) seeds.push_back(parse_unsigned("seeds", part));
  }
  if (seeds.empty()) bad_value("seeds", text);
  return seeds;
}

}  // namespace ed2::harness
