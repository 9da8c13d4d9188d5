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

// Deterministic discrete-event substrate: virtual time, skewed physical
// clocks, the datacenter/partition topology, and message channels.

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <string_view>
#include <vector>

#include "sgkv/messages.h"
#include "sgkv/trace.h"
#include "sgkv/types.h"

namespace sgkv {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [lo, hi].
inline int64_t UniformInt(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  return lo + static_cast<int64_t>(Uniform01(rng) * static_cast<double>(hi - lo + 1));
}

/// D datacenters x P partitions. Every (dc, partition) group has R data
/// replicas followed by one XC learner. Node ids are dense: group g occupies
/// [g*(R+1), (g+1)*(R+1)). Clients are numbered after all servers.
class Topology {
 public:
  Topology(int dcs, int partitions, int replicas, int clients_per_dc);

  int dcs() const { return dcs_; }
  int partitions() const { return partitions_; }
  int replicas() const { return replicas_; }
  int clients_per_dc() const { return clients_per_dc_; }
  int group_size() const { return replicas_ + 1; }
  int group_count() const { return dcs_ * partitions_; }
  int server_count() const { return group_count() * group_size(); }
  int client_count() const { return dcs_ * clients_per_dc_; }
  int node_count() const { return server_count() + client_count(); }

  int Group(DcId d, PartitionId p) const { return d * partitions_ + p; }
  NodeId Replica(DcId d, PartitionId p, int r) const { return Group(d, p) * group_size() + r; }
  NodeId Xc(DcId d, PartitionId p) const { return Group(d, p) * group_size() + replicas_; }
  std::vector<NodeId> Voters(DcId d, PartitionId p) const;

  bool IsServer(NodeId n) const { return n >= 0 && n < server_count(); }
  bool IsClient(NodeId n) const { return n >= server_count() && n < node_count(); }
  bool IsXc(NodeId n) const { return IsServer(n) && n % group_size() == replicas_; }
  int GroupOfNode(NodeId n) const { return n / group_size(); }
  PartitionId PartitionOfNode(NodeId n) const { return GroupOfNode(n) % partitions_; }

  NodeId ClientNode(ClientId c) const { return server_count() + c; }
  ClientId ClientOfNode(NodeId n) const { return n - server_count(); }
  DcId DcOfClient(ClientId c) const { return c / clients_per_dc_; }

  DcId DcOf(NodeId n) const;
  PartitionId PartitionOf(std::string_view key) const { return PartitionOfKey(key, partitions_); }

 private:
  int dcs_;
  int partitions_;
  int replicas_;
  int clients_per_dc_;
};

/// Per-node physical clock: offset plus drift over simulated time.
class ClockModel {
 public:
  struct NodeClock {
    SimTime offset = 0;
    double drift = 0.0;
  };

  ClockModel() = default;
  explicit ClockModel(std::vector<NodeClock> clocks) : clocks_(std::move(clocks)) {}

  // Offsets uniform in [-max_skew, max_skew], drift uniform in [-max_drift, max_drift].
  static ClockModel Random(int nodes, SimTime max_skew, double max_drift, std::mt19937_64& rng);

  // floor((t * (1 + drift) + offset) / 1ms), never below zero.
  uint64_t PhysicalNowMs(NodeId node, SimTime sim_time) const;

  const NodeClock& clock(NodeId n) const { return clocks_.at(n); }
  void Set(NodeId n, NodeClock c) { clocks_.at(n) = c; }
  size_t size() const { return clocks_.size(); }

 private:
  std::vector<NodeClock> clocks_;
};

/// Min-heap of (time, sequence) events. Ties run in insertion order.
class EventLoop {
 public:
  using Action = std::function<void()>;

  struct RunResult {
    uint64_t events = 0;
    bool reached = false;  // target condition met (vs. queue exhausted or limit hit)
  };

  SimTime now() const { return now_; }
  size_t pending() const { return queue_.size(); }
  uint64_t executed() const { return executed_; }

  void Schedule(SimTime at, Action action);
  void ScheduleAfter(SimTime delay, Action action) { Schedule(now_ + delay, std::move(action)); }

  // Runs every event with time <= `until`; afterwards now() == until.
  uint64_t RunUntil(SimTime until);

  // Runs until `done()` holds (checked after every event), the queue drains,
  // or simulated time would pass `limit`.
  RunResult RunUntil(const std::function<bool()>& done, SimTime limit);

 private:
  struct Event {
    SimTime at;
    uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  bool StepOne();

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  SimTime now_ = 0;
  uint64_t next_seq_ = 0;
  uint64_t executed_ = 0;
};

struct ChannelModel {
  SimTime intra_min = Millis(0.2);
  SimTime intra_max = Millis(0.5);
  // Loss and duplication apply to Raft traffic inside a datacenter only.
  double drop_prob = 0.0;
  double dup_prob = 0.0;
  SimTime xdc_delay = Millis(7.5);
  SimTime xdc_jitter = 0;
  // Cross-datacenter links deliver in send order. Off only for negative controls.
  bool fifo = true;
};

/// Routes messages between nodes with the configured delay/loss model.
/// Cross-datacenter channels carry per-channel sequence numbers and a
/// hold-back buffer so delivery order equals send order under jitter.
class Network {
 public:
  using Deliver = std::function<void(NodeId from, NodeId to, Message msg)>;

  Network(EventLoop& loop, const Topology& topology, ChannelModel model, uint64_t seed,
          Deliver deliver, TraceSink* trace);

  void Send(NodeId from, NodeId to, Message msg);

  // Messages other than Raft traffic currently scheduled or held back.
  size_t app_in_flight() const { return app_in_flight_; }
  uint64_t sent() const { return sent_; }
  uint64_t dropped() const { return dropped_; }
  const ChannelModel& model() const { return model_; }

 private:
  struct Channel {
    uint64_t next_send = 0;
    uint64_t next_deliver = 0;
    std::map<uint64_t, Message> held;
  };

  void Arrive(NodeId from, NodeId to, uint64_t seq, Message msg);
  void Hand(NodeId from, NodeId to, uint64_t seq, Message msg);

  EventLoop& loop_;
  const Topology& topology_;
  ChannelModel model_;
  std::mt19937_64 rng_;
  Deliver deliver_;
  TraceSink* trace_;
  std::map<std::pair<NodeId, NodeId>, Channel> channels_;
  size_t app_in_flight_ = 0;
  uint64_t sent_ = 0;
  uint64_t dropped_ = 0;
};

}  // namespace sgkv
