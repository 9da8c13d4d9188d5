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

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sgkv/types.h"

namespace sgkv {

/// Invalid scenario configuration (unknown key, bad type, out-of-range value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scheduled crash or restart. `target` selects the node when the fault
/// fires: "node" (explicit id), "leader", "follower" or "xc" of (dc, partition).
struct FaultSpec {
  std::string action = "crash";  // "crash" | "restart"
  std::string target = "node";
  NodeId node = kNoNode;
  DcId dc = 0;
  PartitionId partition = 0;
  double at_ms = 0;
  // For crash: restart the same node this long afterwards; 0 = stay down.
  double restart_after_ms = 0;
};

/// One step of a scripted client. Scripted clients run their steps in order,
/// each issued `delay_ms` after the previous reply, and skip random load.
struct ScriptOp {
  ClientId client = 0;
  std::string op = "put";  // "get" | "put"
  std::string key;
  std::string value;
  DcId dc = 0;             // target datacenter
  std::string level = "EVENTUAL";
  double delay_ms = 0;
};

struct ScenarioConfig {
  uint64_t seed = 1;
  int dcs = 2;
  int partitions = 1;
  int replicas = 3;
  int clients_per_dc = 8;
  double local_prob = 1.0;
  double write_prob = 0.5;
  // A level name, or "RANDOM" to draw a level per operation.
  std::string read_level = "EVENTUAL";
  std::string write_level = "EVENTUAL";
  bool hlc_mode = true;
  // Without HLC: whether PUTs carry blocking vectors.
  bool write_blocking = true;
  bool fifo = true;
  double xdc_delay_ms = 7.5;
  double xdc_jitter_ms = 0.0;
  double intra_delay_min_ms = 0.2;
  double intra_delay_max_ms = 0.5;
  double skew_ms = 0.0;
  double drift = 0.0;
  // Per-datacenter clock offsets; when set they replace the random skew.
  std::vector<double> dc_offsets_ms;
  double drop_prob = 0.0;
  double dup_prob = 0.0;
  // Load stops at whichever of these comes first; 0 disables a bound.
  double duration_ms = 0.0;
  uint64_t ops = 1000;
  int key_space = 1000;
  std::vector<FaultSpec> faults;
  // Random crash/restart pairs placed during the load phase.
  int random_faults = 0;
  double op_timeout_ms = 200.0;
  double park_timeout_ms = 0.0;
  double service_ms = 0.1;
  double tick_ms = 1.0;
  double retransmit_ms = 50.0;
  int election_min_ticks = 10;
  int election_max_ticks = 20;
  int gc_window = 4;
  double max_sim_ms = 600000.0;
  // Warm-up excluded from latency metrics.
  double warmup_ms = 0.0;
  std::vector<ScriptOp> script;
};

// Parses and validates a JSON object; absent keys keep their defaults.
ScenarioConfig ParseConfig(std::string_view json_text);
// Same, with keys present in `json_text` applied on top of `base`.
ScenarioConfig MergeConfig(const ScenarioConfig& base, std::string_view json_text);
// Canonical JSON with a fixed key order.
std::string ToJson(const ScenarioConfig& config);
void Validate(const ScenarioConfig& config);

// Sets one top-level key. `value` is parsed as JSON, falling back to a string.
void ApplyOverride(ScenarioConfig& config, const std::string& key, const std::string& value);
std::vector<std::string> ConfigKeys();

uint64_t ConfigHash(const ScenarioConfig& config);

struct Preset {
  std::string name;
  std::string description;
  ScenarioConfig config;
};

const std::vector<Preset>& Presets();
// Throws ConfigError for an unknown name.
ScenarioConfig PresetConfig(const std::string& name);

}  // namespace sgkv
