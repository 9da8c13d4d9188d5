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

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sgkv/cluster.h"

namespace sgkv {

inline constexpr std::string_view kMetricsSchema = "sgkv-metrics/1";

struct LatencyStats {
  size_t count = 0;
  double mean_ms = 0;
  double median_ms = 0;
  double p99_ms = 0;
};

LatencyStats Summarize(std::vector<double> samples_ms);

/// Upper bucket edges in ms for the park-time histogram; the last bucket is open.
inline constexpr std::array<double, 6> kParkBucketsMs = {1, 2, 5, 10, 20, 50};

struct MetricsReport {
  LatencyStats all;
  LatencyStats gets;
  LatencyStats puts;
  // Keyed "get:<READ_LEVEL>" / "put:<WRITE_LEVEL>".
  std::map<std::string, LatencyStats> by_level;
  // Operations completed per simulated second by the clients homed in DC 0.
  double throughput = 0;
  double window_ms = 0;
  size_t ops_started = 0;
  size_t ops_completed = 0;
  size_t ops_measured = 0;
  size_t parked_gets = 0;
  size_t parked_puts = 0;
  std::array<size_t, kParkBucketsMs.size() + 1> park_histogram{};
};

/// Latency is issue-to-absorb in simulated time. Only unscripted operations
/// issued inside [load_start + warmup, end of load) count.
MetricsReport ComputeMetrics(const RunResult& run);

std::string MetricsCsvHeader();
std::string MetricsCsvRow(const std::string& label, const MetricsReport& m);

}  // namespace sgkv
