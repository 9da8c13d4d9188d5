// Copyright 2026 The sgkv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sgkv/config.h"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace sgkv {

using json_t = nlohmann::json;  // keys serialize in sorted order

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FaultSpec, action, target, node, dc, partition,
                                                at_ms, restart_after_ms)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScriptOp, client, op, key, value, dc, level,
                                                delay_ms)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    ScenarioConfig, seed, dcs, partitions, replicas, clients_per_dc, local_prob, write_prob,
    read_level, write_level, hlc_mode, write_blocking, fifo, xdc_delay_ms, xdc_jitter_ms,
    intra_delay_min_ms, intra_delay_max_ms, skew_ms, drift, dc_offsets_ms, drop_prob, dup_prob,
    duration_ms, ops, key_space, faults, random_faults, op_timeout_ms, park_timeout_ms,
    service_ms, tick_ms, retransmit_ms, election_min_ticks, election_max_ticks, gc_window,
    max_sim_ms, warmup_ms, script)

namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool IsProb(double p) { return p >= 0.0 && p <= 1.0; }

bool ValidLevel(const std::string& s, bool read) {
  if (s == "RANDOM") return true;
  return read ? ParseReadLevel(s).has_value() : ParseWriteLevel(s).has_value();
}

template <typename T>
void CheckKeys(const json_t& j, const T& defaults, const std::string& where) {
  Require(j.is_object(), where + " must be a JSON object");
  const json_t known = defaults;
  for (const auto& item : j.items()) {
    Require(known.contains(item.key()), "unknown key '" + item.key() + "' in " + where);
  }
}

ScenarioConfig FromJson(const json_t& j) {
  CheckKeys(j, ScenarioConfig{}, "config");
  if (j.contains("faults")) {
    Require(j["faults"].is_array(), "faults must be an array");
    for (const auto& f : j["faults"]) CheckKeys(f, FaultSpec{}, "fault");
  }
  if (j.contains("script")) {
    Require(j["script"].is_array(), "script must be an array");
    for (const auto& s : j["script"]) CheckKeys(s, ScriptOp{}, "script op");
  }
  try {
    ScenarioConfig c = j.get<ScenarioConfig>();
    Validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

}  // namespace

void Validate(const ScenarioConfig& c) {
  Require(c.dcs >= 1 && c.dcs <= 16, "dcs must be in [1,16]");
  Require(c.partitions >= 1 && c.partitions <= 256, "partitions must be in [1,256]");
  Require(c.replicas >= 1 && c.replicas <= 9, "replicas must be in [1,9]");
  Require(c.clients_per_dc >= 0, "clients_per_dc must be >= 0");
  Require(IsProb(c.local_prob), "local_prob must be in [0,1]");
  Require(IsProb(c.write_prob), "write_prob must be in [0,1]");
  Require(IsProb(c.drop_prob) && c.drop_prob < 1.0, "drop_prob must be in [0,1)");
  Require(IsProb(c.dup_prob), "dup_prob must be in [0,1]");
  Require(ValidLevel(c.read_level, true), "unknown read_level " + c.read_level);
  Require(ValidLevel(c.write_level, false), "unknown write_level " + c.write_level);
  Require(c.xdc_delay_ms >= 0 && c.xdc_jitter_ms >= 0, "cross-dc delays must be >= 0");
  Require(c.intra_delay_min_ms > 0 && c.intra_delay_max_ms >= c.intra_delay_min_ms,
          "intra delay range must satisfy 0 < min <= max");
  Require(c.skew_ms >= 0, "skew_ms must be >= 0");
  Require(c.drift > -1.0 && c.drift < 1.0, "drift must be in (-1,1)");
  Require(c.dc_offsets_ms.empty() || static_cast<int>(c.dc_offsets_ms.size()) == c.dcs,
          "dc_offsets_ms needs one entry per datacenter");
  Require(c.duration_ms >= 0, "duration_ms must be >= 0");
  Require(c.key_space >= 1, "key_space must be >= 1");
  Require(c.random_faults >= 0, "random_faults must be >= 0");
  Require(c.op_timeout_ms > 0, "op_timeout_ms must be > 0");
  Require(c.park_timeout_ms >= 0, "park_timeout_ms must be >= 0");
  Require(c.service_ms >= 0, "service_ms must be >= 0");
  Require(c.tick_ms > 0, "tick_ms must be > 0");
  Require(c.retransmit_ms > 0, "retransmit_ms must be > 0");
  Require(c.election_min_ticks >= 2 && c.election_max_ticks >= c.election_min_ticks,
          "election tick range must satisfy 2 <= min <= max");
  Require(c.gc_window >= 0, "gc_window must be >= 0");
  Require(c.max_sim_ms > 0, "max_sim_ms must be > 0");
  Require(c.warmup_ms >= 0, "warmup_ms must be >= 0");
  const int servers = c.dcs * c.partitions * (c.replicas + 1);
  for (const auto& f : c.faults) {
    Require(f.action == "crash" || f.action == "restart", "fault action must be crash|restart");
    Require(f.target == "node" || f.target == "leader" || f.target == "follower" ||
                f.target == "xc",
            "fault target must be node|leader|follower|xc");
    if (f.target == "node") {
      Require(f.node >= 0 && f.node < servers, "fault node out of range");
    } else {
      Require(f.dc >= 0 && f.dc < c.dcs && f.partition >= 0 && f.partition < c.partitions,
              "fault dc/partition out of range");
    }
    Require(f.at_ms >= 0 && f.restart_after_ms >= 0, "fault times must be >= 0");
  }
  for (const auto& s : c.script) {
    Require(s.client >= 0 && s.client < c.dcs * c.clients_per_dc, "script client out of range");
    Require(s.op == "get" || s.op == "put", "script op must be get|put");
    Require(s.dc >= 0 && s.dc < c.dcs, "script dc out of range");
    Require(s.op == "get" ? ParseReadLevel(s.level).has_value()
                          : ParseWriteLevel(s.level).has_value(),
            "unknown script level " + s.level);
    Require(s.delay_ms >= 0, "script delay must be >= 0");
  }
}

ScenarioConfig MergeConfig(const ScenarioConfig& base, std::string_view json_text) {
  json_t patch;
  try {
    patch = json_t::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Require(patch.is_object(), "config must be a JSON object");
  json_t j = base;
  for (const auto& item : patch.items()) j[item.key()] = item.value();
  return FromJson(j);
}

ScenarioConfig ParseConfig(std::string_view json_text) { return MergeConfig(ScenarioConfig{}, json_text); }

std::string ToJson(const ScenarioConfig& config) {
  const json_t j = config;
  return j.dump();
}

std::vector<std::string> ConfigKeys() {
  const json_t j = ScenarioConfig{};
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  return keys;
}

void ApplyOverride(ScenarioConfig& config, const std::string& key, const std::string& value) {
  json_t j = config;
  Require(j.contains(key), "unknown config key '" + key + "'");
  json_t v;
  try {
    v = json_t::parse(value);
  } catch (const nlohmann::json::parse_error&) {
    v = value;
  }
  j[key] = v;
  config = FromJson(j);
}

uint64_t ConfigHash(const ScenarioConfig& config) { return Fnv1a(ToJson(config)); }

namespace {

ScenarioConfig EvaluationBase(double local_prob) {
  ScenarioConfig c;
  c.clients_per_dc = 40;
  c.local_prob = local_prob;
  c.write_prob = 0.5;
  c.ops = 0;
  c.duration_ms = 1500;
  c.warmup_ms = 100;
  c.key_space = 1000;
  return c;
}

std::vector<Preset> BuildPresets() {
  std::vector<Preset> out;
  out.push_back({"default", "2 DCs, 1 partition, 8 clients/DC, 1000 ops, eventual", {}});

  out.push_back({"local100", "40 clients/DC, all traffic local, 50% writes", EvaluationBase(1.0)});
  out.push_back({"remote10", "40 clients/DC, 10% remote traffic, 50% writes", EvaluationBase(0.9)});

  {
    ScenarioConfig c;
    c.partitions = 4;
    c.clients_per_dc = 40;
    c.local_prob = 0.9;
    c.ops = 5000;
    c.key_space = 200;
    c.skew_ms = 100;
    c.read_level = "RANDOM";
    c.write_level = "RANDOM";
    out.push_back({"soundness", "2x4 groups, random levels per op, 100 ms skew", c});
  }
  {
    ScenarioConfig c;
    c.clients_per_dc = 8;
    c.local_prob = 0.9;
    c.ops = 3000;
    c.key_space = 4;
    c.dc_offsets_ms = {0, -25};
    out.push_back({"adversarial", "eventual levels, 4 hot keys, DC1 clock 25 ms behind", c});
  }
  {
    ScenarioConfig c;
    c.clients_per_dc = 1;
    c.ops = 0;
    c.hlc_mode = false;
    c.write_blocking = false;
    c.dc_offsets_ms = {0, -40};
    c.script = {
        {0, "put", "k", "v1", 0, "MONOTONIC_WRITE", 0},
        {0, "put", "k", "v2", 1, "MONOTONIC_WRITE", 0},
        {1, "get", "k", "", 0, "EVENTUAL", 100},
        {1, "get", "k", "", 1, "EVENTUAL", 0},
        {1, "get", "k", "", 0, "EVENTUAL", 50},
        {1, "get", "k", "", 1, "EVENTUAL", 0},
    };
    out.push_back({"two_writes", "one client writes k at DC0 then at DC1 (clock 40 ms behind)", c});
  }
  {
    ScenarioConfig c;
    c.clients_per_dc = 8;
    c.ops = 2000;
    c.write_prob = 0.8;
    c.key_space = 50;
    c.fifo = false;
    c.xdc_jitter_ms = 6;
    out.push_back({"fifo_off", "cross-DC FIFO disabled under jitter (negative control)", c});
  }
  {
    ScenarioConfig c;
    c.clients_per_dc = 8;
    c.ops = 3000;
    c.local_prob = 0.9;
    c.read_level = "RANDOM";
    c.write_level = "RANDOM";
    c.faults = {{"crash", "leader", kNoNode, 0, 0, 150, 200},
                {"crash", "leader", kNoNode, 1, 0, 400, 200}};
    out.push_back({"crash_leader", "leader crashes in both DCs during load", c});
  }
  {
    ScenarioConfig c;
    c.clients_per_dc = 8;
    c.ops = 3000;
    c.local_prob = 0.9;
    c.faults = {{"crash", "xc", kNoNode, 0, 0, 100, 150}, {"crash", "xc", kNoNode, 1, 0, 300, 20}};
    out.push_back({"xc_restart", "XC learners crash and restart during load", c});
  }
  {
    ScenarioConfig c;
    c.replicas = 5;
    c.clients_per_dc = 6;
    c.ops = 1500;
    c.local_prob = 0.9;
    c.drop_prob = 0.05;
    c.dup_prob = 0.05;
    c.random_faults = 3;
    out.push_back({"raft_fuzz", "5 replicas with message loss, duplication and crashes", c});
  }
  return out;
}

}  // namespace

const std::vector<Preset>& Presets() {
  static const std::vector<Preset> presets = BuildPresets();
  return presets;
}

ScenarioConfig PresetConfig(const std::string& name) {
  for (const auto& p : Presets()) {
    if (p.name == name) return p.config;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace sgkv
