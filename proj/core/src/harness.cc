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

#include "sgkv/harness.h"

#include <sstream>

namespace sgkv {

const std::vector<Variant>& Variants() {
  using R = ReadLevel;
  using W = WriteLevel;
  static const std::vector<Variant> variants = {
      {"E", R::kEventual, W::kEventual, false},
      {"M/E", R::kEventual, W::kMonotonicWriteFollowsReads, false},
      {"E/M", R::kMonotonicReadYourWrite, W::kEventual, false},
      {"M/M", R::kMonotonicReadYourWrite, W::kMonotonicWriteFollowsReads, false},
      {"M/E_HLC", R::kEventual, W::kMonotonicWriteFollowsReads, true},
      {"E/M_HLC", R::kMonotonicReadYourWrite, W::kEventual, true},
      {"M/M_HLC", R::kMonotonicReadYourWrite, W::kMonotonicWriteFollowsReads, true},
  };
  return variants;
}

const Variant& FindVariant(std::string_view name) {
  for (const auto& v : Variants()) {
    if (v.name == name) return v;
  }
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

ScenarioConfig WithVariant(ScenarioConfig config, const Variant& v) {
  config.read_level = std::string(ToString(v.read_level));
  config.write_level = std::string(ToString(v.write_level));
  config.hlc_mode = v.hlc_mode;
  config.write_blocking = true;
  return config;
}

ScenarioOutcome RunScenario(const ScenarioConfig& config, const ScenarioOptions& options) {
  ScenarioOutcome out;
  out.run = Simulate(config);
  CheckOptions co;
  co.all_ops = options.check_all_ops;
  out.check = CheckTrace(out.run.events, config.dcs, config.partitions, co);
  out.metrics = ComputeMetrics(out.run);
  if (!out.run.error.empty()) {
    out.exit_code = kExitRunFailed;
  } else if (!out.check.clean() || !out.run.safety_violations.empty()) {
    out.exit_code = kExitViolation;
  }
  if (!options.keep_events) {
    out.run.events.clear();
    out.run.events.shrink_to_fit();
  }
  return out;
}

unsigned DefaultWorkers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<SweepRow> Sweep(const std::string& parameter, const std::vector<double>& values,
                            const ScenarioConfig& base, unsigned workers) {
  if (parameter != "clients_per_dc" && parameter != "local_prob" && parameter != "write_prob") {
    throw ConfigError("sweep parameter must be clients_per_dc, local_prob or write_prob");
  }
  const auto& variants = Variants();
  const size_t nv = variants.size();
  std::vector<ScenarioConfig> configs;
  for (double value : values) {
    for (const auto& v : variants) {
      ScenarioConfig c = WithVariant(base, v);
      if (parameter == "clients_per_dc") {
        c.clients_per_dc = static_cast<int>(value);
      } else if (parameter == "local_prob") {
        c.local_prob = value;
      } else {
        c.write_prob = value;
      }
      Validate(c);
      configs.push_back(std::move(c));
    }
  }
  auto outcomes = ParallelMap<ScenarioOutcome>(configs.size(), workers, [&](size_t i) {
    return RunScenario(configs[i], ScenarioOptions{false, false});
  });
  std::vector<SweepRow> rows;
  for (size_t i = 0; i < values.size(); ++i) {
    SweepRow row;
    row.value = values[i];
    for (size_t j = 0; j < nv; ++j) {
      const ScenarioOutcome& o = outcomes[i * nv + j];
      row.variants.push_back(o.metrics);
      row.violations.push_back(o.check.violations.size() + o.run.safety_violations.size() +
                               (o.run.error.empty() ? 0 : 1));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string SweepCsv(const std::string& parameter, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "# schema " << kSweepSchema << '\n' << parameter;
  for (const auto& v : Variants()) os << ',' << v.name << "_lat_ms," << v.name << "_tput";
  os << '\n';
  os.setf(std::ios::fixed);
  for (const auto& row : rows) {
    os.precision(4);
    os << row.value;
    for (const auto& m : row.variants) {
      os.precision(4);
      os << ',' << m.all.mean_ms;
      os.precision(1);
      os << ',' << m.throughput;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace sgkv
