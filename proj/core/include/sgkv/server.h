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

// Server side of the session protocol: GETs gated on the stable vector,
// PUTs stamped with the leader's HLC (or gated and physically stamped when
// HLC is off), commit application, and cross-datacenter fan-out by the XC
// learner of each group.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "sgkv/hlc.h"
#include "sgkv/messages.h"
#include "sgkv/replicated_log.h"
#include "sgkv/store.h"
#include "sgkv/trace.h"

namespace sgkv {

struct ServerContext {
  SimTime now = 0;
  uint64_t physical_ms = 0;
  TraceSink* trace = nullptr;
  // Current leader of (dc, partition) per the topology registry.
  std::function<NodeId(DcId, PartitionId)> leader_of;
};

struct ServerOutput {
  std::vector<Outbound> messages;
  bool became_leader = false;
};

/// True when some component of the stable vector is behind either request
/// vector, i.e. the request has to wait.
bool MustBlock(const IndexVector& sv, const IndexVector& hrv, const IndexVector& hwv);

/// Requests waiting for the stable vector to catch up.
class PendingTable {
 public:
  struct Entry {
    SimTime parked_at = 0;
    IndexVector hrv;
    IndexVector hwv;
    std::variant<GetRequest, PutRequest> request;
  };

  void Park(Entry e) { entries_.push_back(std::move(e)); }
  // Removes and returns every entry whose predicate no longer holds.
  std::vector<Entry> Release(const IndexVector& sv);
  // Removes and returns entries parked at or before `deadline`.
  std::vector<Entry> Expire(SimTime deadline);
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  void Clear() { entries_.clear(); }

 private:
  std::vector<Entry> entries_;
};

class DataServer {
 public:
  struct Options {
    DcId dc = 0;
    PartitionId partition = 0;
    int dcs = 1;
    bool hlc_mode = true;
    // In-order acceptance of Replicate streams. Off only for the negative control.
    bool fifo = true;
    size_t gc_window = 4;
    int partitions = 1;
    SimTime park_timeout = 0;  // 0 = park forever
    // XC node of this partition in every datacenter, indexed by dc.
    std::vector<NodeId> xc_of_dc;
  };

  DataServer(NodeId id, Options options, raft::Node raft);

  NodeId id() const { return id_; }
  const Options& options() const { return options_; }
  const Store& store() const { return store_; }
  const raft::Node& raft() const { return raft_; }
  const HlcClock& hlc() const { return hlc_; }
  const PendingTable& pending() const { return pending_; }
  bool is_leader() const { return raft_.role() == raft::Role::kLeader; }

  ServerOutput HandleGet(const GetRequest& req, const ServerContext& ctx);
  ServerOutput HandlePut(const PutRequest& req, const ServerContext& ctx);
  ServerOutput HandleReplicate(const Replicate& msg, const ServerContext& ctx);
  ServerOutput HandleRaft(const raft::Message& msg, const ServerContext& ctx);
  ServerOutput Tick(const ServerContext& ctx);

  // Applies one committed entry; exposed for tests that bypass Raft.
  ServerOutput OnCommit(const raft::LogEntry& entry, const ServerContext& ctx);

  void Crash();
  void Restart(SimTime now);

  // Highest origin index from `origin` present anywhere in the local log.
  LogIndex LastOriginInLog(DcId origin);

 private:
  void Absorb(raft::Output&& out, const ServerContext& ctx, ServerOutput& result);
  void Serve(const GetRequest& req, const ServerContext& ctx, ServerOutput& result);
  void StampAndPropose(const PutRequest& req, const ServerContext& ctx, ServerOutput& result);
  HlcTimestamp PhysicalStamp(const std::string& key, uint64_t physical_ms);
  void ReleaseParked(const ServerContext& ctx, ServerOutput& result);
  void Emit(const ServerContext& ctx, TraceEvent e) const;

  struct PendingPut {
    Term term = 0;
    PutRequest request;
    HlcTimestamp t;
  };

  NodeId id_;
  Options options_;
  raft::Node raft_;
  Store store_;
  HlcClock hlc_;
  HlcTimestamp last_physical_stamp_;
  PendingTable pending_;
  std::map<LogIndex, PendingPut> pending_puts_;

  LogIndex scanned_upto_ = 0;
  Term scanned_term_ = 0;
  IndexVector last_origin_in_log_;
};

/// The XC learner of one group: forwards locally originated commits to the
/// leader of the same partition in every other datacenter, in log order.
class XcServer {
 public:
  struct Options {
    DcId dc = 0;
    PartitionId partition = 0;
    int dcs = 1;
    int partitions = 1;
    SimTime retransmit_timeout = Millis(50);
  };

  XcServer(NodeId id, Options options, raft::Node raft);

  NodeId id() const { return id_; }
  const raft::Node& raft() const { return raft_; }
  LogIndex acked(DcId peer) const { return streams_.at(peer).acked; }
  LogIndex sent_upto(DcId peer) const { return streams_.at(peer).sent_upto; }
  LogIndex last_outgoing() const { return outgoing_.empty() ? 0 : outgoing_.back().origin_idx; }

  ServerOutput HandleRaft(const raft::Message& msg, const ServerContext& ctx);
  ServerOutput HandleAck(const ReplicateAck& ack, const ServerContext& ctx);
  ServerOutput Tick(const ServerContext& ctx);

  // Fan-out for one committed entry.
  std::vector<Outbound> OnCommit(const raft::LogEntry& entry, const ServerContext& ctx);

  void Crash();
  void Restart(SimTime now);

  // Everything sent has been acknowledged by every peer datacenter.
  bool Drained() const;

 private:
  struct Stream {
    LogIndex sent_upto = 0;
    LogIndex acked = 0;
    SimTime last_progress = 0;
  };

  void SendRange(DcId peer, size_t from_pos, const ServerContext& ctx, std::vector<Outbound>& out);

  NodeId id_;
  Options options_;
  raft::Node raft_;
  std::vector<ReplicationPayload> outgoing_;
  std::vector<Stream> streams_;
};

}  // namespace sgkv
