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

// sgkv: run scenarios, sweep parameters, re-check traces, list presets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "sgkv/checker.h"
#include "sgkv/config.h"
#include "sgkv/harness.h"
#include "sgkv/metrics.h"
#include "sgkv/trace.h"

namespace {

using namespace sgkv;

struct ConfigSource {
  std::string preset;
  std::string config_file;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> sets;
};

void AddConfigFlags(CLI::App* cmd, ConfigSource& src) {
  cmd->add_option("--preset", src.preset, "Start from a built-in preset (see `sgkv presets`)");
  cmd->add_option("--config", src.config_file, "Scenario config file (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--set", src.sets, "Override a config key: key=value (repeatable)");
  for (const std::string& key : ConfigKeys()) {
    if (key == "seed") continue;
    cmd->add_option_function<std::string>(
        "--" + key, [&src, key](const std::string& v) { src.overrides[key] = v; },
        "Override config key " + key);
  }
}

ScenarioConfig Resolve(const ConfigSource& src) {
  ScenarioConfig cfg;
  if (!src.preset.empty()) cfg = PresetConfig(src.preset);
  if (!src.config_file.empty()) {
    std::ifstream in(src.config_file);
    if (!in) throw std::ios_base::failure("cannot read " + src.config_file);
    std::stringstream ss;
    ss << in.rdbuf();
    // File keys apply on top of the preset.
    cfg = MergeConfig(cfg, ss.str());
  }
  for (const auto& [k, v] : src.overrides) ApplyOverride(cfg, k, v);
  for (const auto& kv : src.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    ApplyOverride(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

bool WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return static_cast<bool>(out);
}

int RunCommand(const ConfigSource& src, uint64_t seed, const std::string& trace_path,
               const std::string& metrics_path, const std::string& report_path, bool all_ops) {
  ScenarioConfig cfg = Resolve(src);
  cfg.seed = seed;
  Validate(cfg);
  ScenarioOutcome out = RunScenario(cfg, ScenarioOptions{all_ops, true});

  if (!trace_path.empty()) {
    std::ofstream t(trace_path);
    if (!t) {
      std::cerr << "error: cannot write " << trace_path << '\n';
      return kExitIo;
    }
    WriteTrace(t, out.run.header, out.run.events);
  }
  const std::string metrics = "# schema " + std::string(kMetricsSchema) + "\n" +
                              MetricsCsvHeader() + "\n" +
                              MetricsCsvRow("seed=" + std::to_string(seed), out.metrics) + "\n";
  std::string report = FormatReport(out.check);
  for (const auto& s : out.run.safety_violations) report += "safety " + s + "\n";
  if (!out.run.error.empty()) report += "error " + out.run.error + "\n";
  if (!metrics_path.empty() && !WriteFile(metrics_path, metrics)) {
    std::cerr << "error: cannot write " << metrics_path << '\n';
    return kExitIo;
  }
  if (!report_path.empty() && !WriteFile(report_path, report)) {
    std::cerr << "error: cannot write " << report_path << '\n';
    return kExitIo;
  }
  std::cout << metrics;
  std::printf("trace_hash=%016llx events=%zu quiesced=%s sim_end_ms=%.3f\n",
              static_cast<unsigned long long>(out.run.trace_hash), out.run.events.size(),
              out.run.quiesced ? "yes" : "no", ToMillis(out.run.end_time));
  std::cout << report;
  return out.exit_code;
}

std::vector<double> ParseValues(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad sweep value '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("sweep needs at least one value");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgkv: per-key session guarantees over Raft, simulated"};
  app.require_subcommand(1);

  ConfigSource run_src;
  uint64_t run_seed = 0;
  std::string trace_path, metrics_path, report_path;
  bool run_all_ops = false;
  auto* run = app.add_subcommand("run", "Run one scenario to quiescence and check it");
  AddConfigFlags(run, run_src);
  run->add_option("--seed", run_seed, "Random seed")->required();
  run->add_option("--trace", trace_path, "Write the trace (NDJSON) here");
  run->add_option("--metrics", metrics_path, "Write the metrics CSV here");
  run->add_option("--report", report_path, "Write the violation report here");
  run->add_flag("--all-ops", run_all_ops, "Check every guarantee on every operation");

  ConfigSource sweep_src;
  std::string param, values_text, sweep_out;
  uint64_t sweep_seed = 1;
  unsigned workers = DefaultWorkers();
  auto* sweep = app.add_subcommand("sweep", "One run per value and consistency variant");
  AddConfigFlags(sweep, sweep_src);
  sweep->add_option("--param", param, "clients_per_dc | local_prob | write_prob")->required();
  sweep->add_option("--values", values_text, "Comma-separated values")->required();
  sweep->add_option("--seed", sweep_seed, "Random seed");
  sweep->add_option("--workers", workers, "Parallel simulations");
  sweep->add_option("--out", sweep_out, "Write the CSV here instead of stdout");

  std::string check_trace, check_report;
  bool check_all_ops = false;
  auto* check = app.add_subcommand("check", "Re-run the checkers on a trace file");
  check->add_option("--trace", check_trace, "Trace file")->required();
  check->add_option("--report", check_report, "Write the violation report here");
  check->add_flag("--all-ops", check_all_ops, "Check every guarantee on every operation");

  auto* presets = app.add_subcommand("presets", "List built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) {
      return RunCommand(run_src, run_seed, trace_path, metrics_path, report_path, run_all_ops);
    }
    if (sweep->parsed()) {
      ScenarioConfig base = Resolve(sweep_src);
      base.seed = sweep_seed;
      auto rows = Sweep(param, ParseValues(values_text), base, workers);
      const std::string csv = SweepCsv(param, rows);
      if (!sweep_out.empty()) {
        if (!WriteFile(sweep_out, csv)) {
          std::cerr << "error: cannot write " << sweep_out << '\n';
          return kExitIo;
        }
      } else {
        std::cout << csv;
      }
      for (const auto& row : rows) {
        for (size_t v : row.violations) {
          if (v > 0) return kExitViolation;
        }
      }
      return kExitOk;
    }
    if (check->parsed()) {
      std::ifstream in(check_trace);
      if (!in) {
        std::cerr << "error: cannot read " << check_trace << '\n';
        return kExitIo;
      }
      ParsedTrace t = ReadTrace(in);
      CheckReport r = CheckTrace(t.events, t.header.dcs, t.header.partitions,
                                 CheckOptions{check_all_ops});
      const std::string text = FormatReport(r);
      if (!check_report.empty() && !WriteFile(check_report, text)) {
        std::cerr << "error: cannot write " << check_report << '\n';
        return kExitIo;
      }
      std::cout << text;
      return r.clean() ? kExitOk : kExitViolation;
    }
    if (presets->parsed()) {
      for (const auto& p : Presets()) std::printf("%-14s %s\n", p.name.c_str(), p.description.c_str());
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
