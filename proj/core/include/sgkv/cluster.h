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

// One simulated deployment: D datacenters x P partitions, each group a Raft
// group of R data replicas plus an XC learner, driven by closed-loop clients.

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sgkv/client_session.h"
#include "sgkv/config.h"
#include "sgkv/server.h"
#include "sgkv/simnet.h"
#include "sgkv/trace.h"

namespace sgkv {

/// One logical client operation, from first issue to the absorbed reply.
struct OpRecord {
  ClientId client = kNoClient;
  DcId home_dc = 0;
  DcId target_dc = 0;
  OpKind op = OpKind::kGet;
  ReadLevel read_level = ReadLevel::kEventual;
  WriteLevel write_level = WriteLevel::kEventual;
  SimTime issued = 0;
  SimTime completed = -1;  // -1 while unfinished
  int attempts = 0;
  bool scripted = false;
};

struct RunResult {
  ScenarioConfig config;
  TraceHeader header;
  std::vector<TraceEvent> events;
  std::vector<OpRecord> ops;
  uint64_t trace_hash = 0;
  bool quiesced = false;
  SimTime load_start = 0;
  SimTime load_end = 0;
  SimTime end_time = 0;
  uint64_t events_executed = 0;
  uint64_t messages_sent = 0;
  // Raft safety and internal invariant failures found during or after the run.
  std::vector<std::string> safety_violations;
  // Non-empty when the run aborted (invariant breach, clock overflow).
  std::string error;
};

class Cluster {
 public:
  explicit Cluster(ScenarioConfig config);
  ~Cluster();
  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  // Drives the whole scenario: election, load, faults, quiescence, final
  // snapshots and post-run Raft checks.
  RunResult Run();

  const Topology& topology() const { return topology_; }
  const DataServer* data_server(NodeId n) const;
  const XcServer* xc_server(NodeId n) const;
  NodeId leader(DcId d, PartitionId p) const { return leaders_.at(topology_.Group(d, p)); }

 private:
  struct ClientState;
  struct Pending;

  void Deliver(NodeId from, NodeId to, Message msg);
  void Process(NodeId to, Message msg);
  void Dispatch(NodeId from, ServerOutput&& out);
  void TickAll();
  bool CheckQuiescent() const;
  bool AllGroupsHaveLeaders() const;

  void Crash(NodeId n);
  void Restart(NodeId n);
  NodeId ResolveFault(const FaultSpec& f);
  void ScheduleFaults();

  void StartClients();
  void NextOp(ClientId c);
  void Issue(ClientId c);
  void OnGetReply(ClientId c, const GetReply& r);
  void OnPutReply(ClientId c, const PutReply& r);
  void OnTimeout(ClientId c, uint64_t token);
  void Retry(ClientId c, std::optional<NodeId> hint, SimTime delay);
  void Complete(ClientId c);
  bool LoadOpen() const;

  void EmitFinalSnapshots();
  void CheckLogs(RunResult& result) const;
  ServerContext& Ctx(NodeId n);

  ScenarioConfig config_;
  Topology topology_;
  EventLoop loop_;
  ClockModel clocks_;
  VectorTraceSink trace_;
  std::unique_ptr<Network> network_;
  std::mt19937_64 workload_rng_;

  std::vector<std::unique_ptr<DataServer>> data_;
  std::vector<std::unique_ptr<XcServer>> xc_;
  std::vector<bool> alive_;
  std::vector<uint64_t> incarnation_;
  std::vector<SimTime> cpu_free_at_;
  std::vector<NodeId> leaders_;
  ServerContext ctx_;

  std::vector<std::unique_ptr<ClientState>> clients_;
  std::vector<OpRecord> ops_;
  uint64_t ops_started_ = 0;
  SimTime load_start_ = 0;
  bool load_started_ = false;
  size_t faults_outstanding_ = 0;
  bool quiescent_ = false;
  std::vector<std::string> safety_;
};

// Convenience: build, run, return.
RunResult Simulate(const ScenarioConfig& config);

}  // namespace sgkv
