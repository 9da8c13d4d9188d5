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

#include "sgkv/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace sgkv {

LatencyStats Summarize(std::vector<double> samples) {
  LatencyStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  s.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  const size_t n = samples.size();
  s.median_ms = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  // Nearest-rank percentile.
  const size_t rank = static_cast<size_t>(std::ceil(0.99 * static_cast<double>(n)));
  s.p99_ms = samples[std::max<size_t>(rank, 1) - 1];
  return s;
}

MetricsReport ComputeMetrics(const RunResult& run) {
  MetricsReport m;
  const ScenarioConfig& c = run.config;
  const SimTime start = run.load_start + Millis(c.warmup_ms);
  const SimTime end =
      c.duration_ms > 0 ? run.load_start + Millis(c.duration_ms) : std::max(run.load_end + 1, start);
  m.window_ms = ToMillis(end - start);

  std::vector<double> all, gets, puts;
  std::map<std::string, std::vector<double>> by_level;
  size_t dc0_completed = 0;
  for (const OpRecord& op : run.ops) {
    if (op.scripted) continue;
    ++m.ops_started;
    if (op.completed < 0) continue;
    ++m.ops_completed;
    if (op.home_dc == 0 && op.completed >= start && op.completed < end) ++dc0_completed;
    if (op.issued < start || op.issued >= end) continue;
    const double ms = ToMillis(op.completed - op.issued);
    ++m.ops_measured;
    all.push_back(ms);
    if (op.op == OpKind::kGet) {
      gets.push_back(ms);
      by_level["get:" + std::string(ToString(op.read_level))].push_back(ms);
    } else {
      puts.push_back(ms);
      by_level["put:" + std::string(ToString(op.write_level))].push_back(ms);
    }
  }
  m.all = Summarize(std::move(all));
  m.gets = Summarize(std::move(gets));
  m.puts = Summarize(std::move(puts));
  for (auto& [k, v] : by_level) m.by_level[k] = Summarize(std::move(v));
  if (end > start) m.throughput = static_cast<double>(dc0_completed) / (ToMillis(end - start) / 1000.0);

  // Park time: from the Parked record to the serve (GET) or the commit at
  // the parking node (PUT).
  std::unordered_map<uint64_t, SimTime> parked;
  auto op_key = [](const TraceEvent& e) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(e.client)) << 40) ^ e.req;
  };
  auto bucket = [&](SimTime d) {
    const double ms = ToMillis(d);
    size_t b = 0;
    while (b < kParkBucketsMs.size() && ms >= kParkBucketsMs[b]) ++b;
    ++m.park_histogram[b];
  };
  for (const TraceEvent& e : run.events) {
    if (e.kind == EventKind::kParked) {
      (e.op == OpKind::kPut ? m.parked_puts : m.parked_gets)++;
      parked[op_key(e)] = e.time;
    } else if (e.kind == EventKind::kGetServed || e.kind == EventKind::kPutCommittedAtServer) {
      auto it = parked.find(op_key(e));
      if (it != parked.end()) {
        bucket(e.time - it->second);
        parked.erase(it);
      }
    }
  }
  return m;
}

std::string MetricsCsvHeader() {
  std::ostringstream os;
  os << "label,ops_started,ops_completed,ops_measured,mean_ms,median_ms,p99_ms,get_mean_ms,"
        "put_mean_ms,throughput_dc0,parked_gets,parked_puts";
  for (double b : kParkBucketsMs) os << ",park_lt_" << b << "ms";
  os << ",park_ge_" << kParkBucketsMs.back() << "ms";
  return os.str();
}

std::string MetricsCsvRow(const std::string& label, const MetricsReport& m) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << label << ',' << m.ops_started << ',' << m.ops_completed << ',' << m.ops_measured << ','
     << m.all.mean_ms << ',' << m.all.median_ms << ',' << m.all.p99_ms << ',' << m.gets.mean_ms
     << ',' << m.puts.mean_ms << ',' << m.throughput << ',' << m.parked_gets << ','
     << m.parked_puts;
  for (size_t n : m.park_histogram) os << ',' << n;
  return os.str();
}

}  // namespace sgkv
