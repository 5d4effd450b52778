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

#include "ed2/harness/runlog.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ed2/harness/config.hpp"

namespace ed2::harness {

using nlohmann::json;

metrics::RunSeries RunLog::series() const {
  metrics::RunSeries s;
  s.seed = seed;
  s.config_hash = config_hash;
  for (const EvalRecord& e : evals) s.phases.push_back({e.env_step, e.returns});
  return s;
}

namespace {

json header_json(const RunLog& log) {
  return json{{"type", "header"},           {"config_hash", log.config_hash}, {"seed", log.seed},
              {"env", log.env},             {"variant", log.variant},         {"config", log.config_text}};
}

json episode_json(const EpisodeRecord& e) {
  return json{{"type", "episode"}, {"env_step", e.env_step}, {"length", e.length},
              {"return", e.ret},   {"success", e.success},   {"actor", e.actor}};
}

json burst_json(const BurstRecord& b) {
  return json{{"type", "burst"},          {"env_step", b.env_step},     {"updates", b.updates},
              {"critic_loss", b.critic_loss}, {"actor_loss", b.actor_loss}, {"mean_q", b.mean_q},
              {"eta", b.eta}};
}

json eval_json(const EvalRecord& e) {
  json j{{"type", "eval"}, {"env_step", e.env_step}, {"returns", e.returns},
         {"mean", e.mean}, {"std", e.std},           {"success_rate", e.success_rate}};
  if (!e.member_returns.empty()) {
    j["member_returns"] = e.member_returns;
    j["member_std"] = e.member_std;
  }
  return j;
}

json final_json(const RunLog& log) {
  json j{{"type", "final"}, {"status", log.status}, {"env_steps", log.env_steps}, {"updates", log.updates},
         {"eval_phases", log.evals.size()}};
  j["rmsd"] = log.rmsd ? json(*log.rmsd) : json(nullptr);
  j["solve_step"] = log.solve_step ? json(*log.solve_step) : json(nullptr);
  if (!log.abort_reason.empty()) j["abort_reason"] = log.abort_reason;
  return j;
}

// Non-finite losses are logged as null; read them back as NaN.
double number_or_nan(const json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string to_jsonl(const RunLog& log) {
  std::string out = header_json(log).dump() + "\n";
  std::size_t e = 0;
  std::size_t b = 0;
  std::size_t v = 0;
  auto step_of = [](const auto& records, std::size_t i) {
    return i < records.size() ? records[i].env_step : std::numeric_limits<std::uint64_t>::max();
  };
  while (e < log.episodes.size() || b < log.bursts.size() || v < log.evals.size()) {
    const auto se = step_of(log.episodes, e);
    const auto sb = step_of(log.bursts, b);
    const auto sv = step_of(log.evals, v);
    if (se <= sb && se <= sv && e < log.episodes.size()) {
      out += episode_json(log.episodes[e++]).dump() + "\n";
    } else if (sb <= sv && b < log.bursts.size()) {
      out += burst_json(log.bursts[b++]).dump() + "\n";
    } else {
      out += eval_json(log.evals[v++]).dump() + "\n";
    }
  }
  out += final_json(log).dump() + "\n";
  return out;
}

RunLog parse_jsonl(const std::string& text) {
  RunLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool have_final = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      const std::string type = j.at("type");
      if (type == "header") {
        log.config_hash = j.at("config_hash");
        log.seed = j.at("seed");
        log.env = j.at("env");
        log.variant = j.at("variant");
        log.config_text = j.at("config");
        have_header = true;
      } else if (type == "episode") {
        log.episodes.push_back({j.at("env_step"), j.at("length"), number_or_nan(j.at("return")), j.at("success"),
                                j.at("actor")});
      } else if (type == "burst") {
        log.bursts.push_back({j.at("env_step"), j.at("updates"), number_or_nan(j.at("critic_loss")),
                              number_or_nan(j.at("actor_loss")), number_or_nan(j.at("mean_q")), j.at("eta")});
      } else if (type == "eval") {
        EvalRecord r;
        r.env_step = j.at("env_step");
        r.returns = j.at("returns").get<std::vector<double>>();
        r.mean = j.at("mean");
        r.std = j.at("std");
        r.success_rate = j.at("success_rate");
        if (j.contains("member_returns")) {
          r.member_returns = j.at("member_returns").get<std::vector<std::vector<double>>>();
          r.member_std = j.at("member_std").get<std::vector<double>>();
        }
        log.evals.push_back(std::move(r));
      } else if (type == "final") {
        log.status = j.at("status");
        log.env_steps = j.at("env_steps");
        log.updates = j.at("updates");
        if (!j.at("rmsd").is_null()) log.rmsd = j.at("rmsd").get<double>();
        if (!j.at("solve_step").is_null()) log.solve_step = j.at("solve_step").get<std::uint64_t>();
        if (j.contains("abort_reason")) log.abort_reason = j.at("abort_reason");
        have_final = true;
      } else {
        throw HarnessError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw HarnessError("run log line " + std::to_string(lineno) + ": " + e.what());
    } catch (const HarnessError& e) {
      throw HarnessError("run log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw HarnessError("run log: missing header record");
  if (!have_final) throw HarnessError("run log: missing final record (run incomplete?)");
  return log;
}

void write_run_log(const RunLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw HarnessError("cannot write " + path);
  out << to_jsonl(log);
  if (!out) throw HarnessError("write failed for " + path);
}

RunLog read_run_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HarnessError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_jsonl(ss.str());
  } catch (const HarnessError& e) {
    throw HarnessError(path + ": " + e.what());
  }
}

}  // namespace ed2::harness
