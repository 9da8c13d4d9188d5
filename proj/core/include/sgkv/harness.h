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

#include <atomic>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sgkv/checker.h"
#include "sgkv/cluster.h"
#include "sgkv/config.h"
#include "sgkv/metrics.h"

namespace sgkv {

inline constexpr std::string_view kSweepSchema = "sgkv-sweep/1";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitViolation = 2,
  kExitIo = 3,
  kExitRunFailed = 4,
};

/// A read/write level pair plus the stamping mode, named like the columns of
/// the evaluation: E, M/E, E/M, M/M and the _HLC forms. The first letter is
/// the write level (M = monotonic-write + write-follows-reads), the second
/// the read level (M = monotonic-read + read-your-write).
struct Variant {
  std::string name;
  ReadLevel read_level;
  WriteLevel write_level;
  bool hlc_mode;
};

const std::vector<Variant>& Variants();
const Variant& FindVariant(std::string_view name);
ScenarioConfig WithVariant(ScenarioConfig config, const Variant& v);

struct ScenarioOutcome {
  RunResult run;
  CheckReport check;
  MetricsReport metrics;
  int exit_code = kExitOk;
};

struct ScenarioOptions {
  bool check_all_ops = false;
  bool keep_events = true;
};

/// Simulates to quiescence, then checks (at the requested levels unless
/// check_all_ops) and computes metrics. exit_code is kExitRunFailed for an
/// aborted run, kExitViolation for any violation or Raft safety failure.
ScenarioOutcome RunScenario(const ScenarioConfig& config, const ScenarioOptions& options = {});

/// Runs f(i) for i in [0, n) over `workers` threads; results keep index order.
template <typename R>
std::vector<R> ParallelMap(size_t n, unsigned workers, const std::function<R(size_t)>& f) {
  std::vector<R> out(n);
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) out[i] = f(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

unsigned DefaultWorkers();

struct SweepRow {
  double value = 0;
  std::vector<MetricsReport> variants;  // in Variants() order
  std::vector<size_t> violations;
};

/// One run per (value, variant). `parameter` is clients_per_dc, local_prob or
/// write_prob. Throws ConfigError on anything else.
std::vector<SweepRow> Sweep(const std::string& parameter, const std::vector<double>& values,
                            const ScenarioConfig& base, unsigned workers);
std::string SweepCsv(const std::string& parameter, const std::vector<SweepRow>& rows);

}  // namespace sgkv
