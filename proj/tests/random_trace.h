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


// Random event sequences shaped like simulator traces, for cross-checking
// the incremental checker against the brute-force oracle.

#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sgkv/simnet.h"
#include "sgkv/trace.h"

namespace sgkv::testing {

// Two datacenters, one partition, two data servers per datacenter
// (nodes 0,1 in DC0 and 2,3 in DC1), three clients and two keys.
class RandomTraceBuilder {
 public:
  static constexpr int kDcs = 2;
  static constexpr int kPartitions = 1;

  explicit RandomTraceBuilder(uint64_t seed) : rng_(seed) {}

  std::vector<TraceEvent> Build(size_t max_events) {
    while (events_.size() < max_events) Step();
    events_.resize(max_events);
    return events_;
  }

 private:
  struct Server {
    std::map<std::string, std::vector<VersionId>> committed;
    std::set<VersionId> applied;
    IndexVector sv = IndexVector(kDcs, 0);
  };
  struct Pending {
    bool get = true;
    std::string key;
    RequestId req = 0;
    NodeId server = -1;
    std::optional<VersionId> result;  // served version (gets) or committed id (puts)
    bool served = false;
    ReadLevel rl = ReadLevel::kEventual;
  };

  static int DcOfServer(NodeId n) { return n / 2; }

  double U() { return Uniform01(rng_); }
  int Pick(int n) { return static_cast<int>(UniformInt(rng_, 0, n - 1)); }

  void Emit(TraceEvent e) {
    e.seq = events_.size();
    e.time = static_cast<SimTime>(events_.size()) * 100;
    events_.push_back(std::move(e));
  }

  void Commit(NodeId n, const std::string& key, VersionId v, ClientId writer, RequestId req) {
    Server& s = servers_[n];
    s.committed[key].push_back(v);
    s.applied.insert(v);
    TraceEvent e;
    e.kind = EventKind::kPutCommittedAtServer;
    e.node = n;
    e.group = DcOfServer(n);
    e.client = writer;
    e.req = req;
    e.key = key;
    e.version = v;
    Emit(e);
  }

  void Snapshot(NodeId n) {
    Server& s = servers_[n];
    for (DcId d = 0; d < kDcs; ++d) {
      LogIndex hi = 0;
      for (const auto& v : s.applied) {
        if (v.dc == d) hi = std::max(hi, v.idx);
      }
      s.sv[d] = hi;
    }
    TraceEvent e;
    e.kind = EventKind::kSvSnapshot;
    e.node = n;
    e.group = DcOfServer(n);
    e.sv = s.sv;
    Emit(e);
  }

  void Step() {
    const double r = U();
    if (r < 0.2) {
      IssueOne();
    } else if (r < 0.45) {
      ServeOne();
    } else if (r < 0.6) {
      ReplyOne();
    } else if (r < 0.85) {
      ReplicateOne();
    } else if (r < 0.97) {
      Snapshot(static_cast<NodeId>(Pick(4)));
    } else {
      const NodeId n = static_cast<NodeId>(Pick(4));
      servers_[n] = Server{};
      TraceEvent e;
      e.kind = EventKind::kCrash;
      e.node = n;
      e.group = DcOfServer(n);
      Emit(e);
    }
  }

  void IssueOne() {
    const ClientId c = Pick(3);
    if (pending_.count(c)) return;
    Pending p;
    p.get = U() < 0.5;
    p.key = U() < 0.5 ? "a" : "b";
    p.req = ++next_req_;
    p.server = static_cast<NodeId>(Pick(4));
    TraceEvent e;
    e.kind = p.get ? EventKind::kGetIssued : EventKind::kPutIssued;
    e.client = c;
    e.req = p.req;
    e.key = p.key;
    e.op = p.get ? OpKind::kGet : OpKind::kPut;
    e.dc = DcOfServer(p.server);
    if (p.get) {
      p.rl = static_cast<ReadLevel>(Pick(4));
      e.read_level = p.rl;
    } else {
      e.write_level = static_cast<WriteLevel>(Pick(4));
    }
    pending_[c] = p;
    Emit(e);
  }

  void ServeOne() {
    if (pending_.empty()) return;
    auto it = pending_.begin();
    std::advance(it, Pick(static_cast<int>(pending_.size())));
    Pending& p = it->second;
    if (p.served) return;
    p.served = true;
    if (!p.get) {
      // Leader commit of a fresh local-origin write.
      const DcId dc = DcOfServer(p.server);
      const VersionId v{dc, ++origin_next_[dc]};
      origin_key_[v] = p.key;
      origin_writer_[v] = {it->first, p.req};
      Commit(p.server, p.key, v, it->first, p.req);
      p.result = v;
      return;
    }
    const Server& s = servers_[p.server];
    TraceEvent e;
    e.kind = EventKind::kGetServed;
    e.node = p.server;
    e.group = DcOfServer(p.server);
    e.client = it->first;
    e.req = p.req;
    e.key = p.key;
    e.read_level = p.rl;
    e.sv = s.sv;
    auto chain = s.committed.find(p.key);
    if (U() < 0.05 && !origin_key_.empty()) {
      // An uncommitted or foreign version: exercises the committed-read check.
      auto o = origin_key_.begin();
      std::advance(o, Pick(static_cast<int>(origin_key_.size())));
      e.found = true;
      e.version = o->first;
    } else if (chain != s.committed.end() && !chain->second.empty()) {
      e.found = true;
      e.version = chain->second[static_cast<size_t>(Pick(static_cast<int>(chain->second.size())))];
    }
    if (e.found) p.result = e.version;
    Emit(e);
  }

  void ReplyOne() {
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      Pending& p = it->second;
      if (!p.served) continue;
      TraceEvent e;
      e.kind = p.get ? EventKind::kGetReplied : EventKind::kPutReplied;
      e.client = it->first;
      e.req = p.req;
      e.key = p.key;
      e.found = p.result.has_value();
      if (p.result) e.version = *p.result;
      pending_.erase(it);
      Emit(e);
      return;
    }
  }

  void ReplicateOne() {
    if (origin_key_.empty()) return;
    auto o = origin_key_.begin();
    std::advance(o, Pick(static_cast<int>(origin_key_.size())));
    const NodeId n = static_cast<NodeId>(Pick(4));
    if (servers_[n].applied.count(o->first)) return;
    const auto& w = origin_writer_[o->first];
    Commit(n, o->second, o->first, w.first, w.second);
  }

  std::mt19937_64 rng_;
  std::vector<TraceEvent> events_;
  std::map<NodeId, Server> servers_;
  std::map<ClientId, Pending> pending_;
  std::map<DcId, LogIndex> origin_next_;
  std::map<VersionId, std::string> origin_key_;
  std::map<VersionId, std::pair<ClientId, RequestId>> origin_writer_;
  RequestId next_req_ = 0;
};

}  // namespace sgkv::testing
