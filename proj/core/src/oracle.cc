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

#include "sgkv/oracle.h"

#include <algorithm>
#include <optional>

namespace sgkv {

namespace {

// Latest GetIssued/PutIssued for (client, req) strictly before `before`.
const TraceEvent* IssueOf(const std::vector<TraceEvent>& events, ClientId client, RequestId req,
                          uint64_t before) {
  const TraceEvent* found = nullptr;
  for (const auto& e : events) {
    if (e.seq >= before) break;
    if ((e.kind == EventKind::kGetIssued || e.kind == EventKind::kPutIssued) &&
        e.client == client && e.req == req) {
      found = &e;
    }
  }
  return found;
}

std::set<VersionId> AppliedAt(const std::vector<TraceEvent>& events, NodeId server,
                              uint64_t before) {
  std::set<VersionId> out;
  for (const auto& e : events) {
    if (e.seq >= before) break;
    if (e.node != server) continue;
    if (e.kind == EventKind::kCrash) out.clear();
    if (e.kind == EventKind::kPutCommittedAtServer) out.insert(e.version);
  }
  return out;
}

int GroupOf(const std::vector<TraceEvent>& events, NodeId server) {
  for (const auto& e : events) {
    if (e.node == server && e.group >= 0 &&
        (e.kind == EventKind::kPutCommittedAtServer || e.kind == EventKind::kGetServed ||
         e.kind == EventKind::kSvSnapshot)) {
      return e.group;
    }
  }
  return -1;
}

Violation Make(std::string_view def, const TraceEvent& e, VersionId offending, uint64_t witness) {
  Violation v;
  v.def = std::string(def);
  v.seq = e.seq;
  v.time = e.time;
  v.client = e.client;
  v.server = e.node;
  v.key = e.key;
  v.offending = offending;
  v.witness_seq = witness;
  return v;
}

}  // namespace

std::set<VersionId> CommittedWritesAt(const std::vector<TraceEvent>& events, NodeId server,
                                      const std::string& key, uint64_t before) {
  std::set<VersionId> out;
  for (const auto& e : events) {
    if (e.seq >= before) break;
    if (e.node != server) continue;
    if (e.kind == EventKind::kCrash) out.clear();
    if (e.kind == EventKind::kPutCommittedAtServer && e.key == key) out.insert(e.version);
  }
  return out;
}

std::set<VersionId> ClientWritesAt(const std::vector<TraceEvent>& events, ClientId client,
                                   const std::string& key, uint64_t before) {
  std::set<VersionId> out;
  for (const auto& e : events) {
    if (e.seq >= before) break;
    if (e.kind == EventKind::kPutReplied && e.client == client && e.key == key) {
      out.insert(e.version);
    }
  }
  return out;
}

std::set<VersionId> ClientReadsAt(const std::vector<TraceEvent>& events, ClientId client,
                                  const std::string& key, uint64_t before) {
  std::set<VersionId> out;
  for (const auto& e : events) {
    if (e.seq >= before) break;
    if (e.kind == EventKind::kGetReplied && e.found && e.client == client && e.key == key) {
      out.insert(e.version);
    }
  }
  return out;
}

OracleSets OracleReplay(const std::vector<TraceEvent>& events, uint64_t before) {
  OracleSets s;
  for (const auto& e : events) {
    if (e.seq >= before) break;
    switch (e.kind) {
      case EventKind::kPutCommittedAtServer:
        s.committed_writes[{e.node, e.key}] = CommittedWritesAt(events, e.node, e.key, before);
        break;
      case EventKind::kPutReplied:
        s.client_writes[{e.client, e.key}] = ClientWritesAt(events, e.client, e.key, before);
        break;
      case EventKind::kGetReplied:
        if (e.found) s.client_reads[{e.client, e.key}] = ClientReadsAt(events, e.client, e.key, before);
        break;
      default:
        break;
    }
  }
  // A crash can leave a server with nothing committed; drop empty entries.
  std::erase_if(s.committed_writes, [](const auto& kv) { return kv.second.empty(); });
  return s;
}

std::vector<Violation> OracleCheck(const std::vector<TraceEvent>& events, int dcs, int partitions,
                                   const CheckOptions& options) {
  std::vector<Violation> out;
  // Stable-vector lemma violations already reported per server incarnation.
  std::map<NodeId, std::set<VersionId>> lemma_reported;
  for (const auto& g : events) {
    if (g.kind == EventKind::kCrash) lemma_reported.erase(g.node);
    if (g.kind == EventKind::kGetServed) {
      const auto committed = CommittedWritesAt(events, g.node, g.key, g.seq);
      if (g.found && !committed.count(g.version)) out.push_back(Make(defs::kCommittedReads, g, g.version, 0));

      const TraceEvent* issue = IssueOf(events, g.client, g.req, g.seq);
      if (issue != nullptr && issue->kind == EventKind::kGetIssued && issue->key == g.key) {
        if (options.all_ops || RequiresMonotonicRead(g.read_level)) {
          for (const VersionId& w : ClientReadsAt(events, g.client, g.key, issue->seq)) {
            if (!committed.count(w)) out.push_back(Make(defs::kMonotonicRead, g, w, issue->seq));
          }
        }
        if (options.all_ops || RequiresReadYourWrite(g.read_level)) {
          for (const VersionId& w : ClientWritesAt(events, g.client, g.key, issue->seq)) {
            if (!committed.count(w)) out.push_back(Make(defs::kReadYourWrite, g, w, issue->seq));
          }
        }
      }

      if (!g.found) continue;
      // Definitions 6 and 7: some write O committed at this server forbids
      // the returned version.
      std::optional<uint64_t> mw;
      std::optional<uint64_t> wfr;
      std::optional<uint64_t> last_crash;
      for (const auto& e : events) {
        if (e.seq >= g.seq) break;
        if (e.kind == EventKind::kCrash && e.node == g.node) last_crash = e.seq;
      }
      for (const auto& cm : events) {
        if (cm.seq >= g.seq) break;
        if (cm.kind != EventKind::kPutCommittedAtServer || cm.node != g.node || cm.key != g.key) continue;
        if (last_crash && cm.seq < *last_crash) continue;
        const TraceEvent* o = IssueOf(events, cm.client, cm.req, cm.seq);
        if (o == nullptr || o->kind != EventKind::kPutIssued || o->key != g.key) continue;
        if (g.version == cm.version) continue;
        if ((options.all_ops || RequiresMonotonicWrite(o->write_level)) &&
            ClientWritesAt(events, cm.client, g.key, o->seq).count(g.version)) {
          mw = std::max(mw.value_or(0), o->seq);
        }
        if ((options.all_ops || RequiresWriteFollowsReads(o->write_level)) &&
            ClientReadsAt(events, cm.client, g.key, o->seq).count(g.version)) {
          wfr = std::max(wfr.value_or(0), o->seq);
        }
      }
      if (mw) out.push_back(Make(defs::kMonotonicWrite, g, g.version, *mw));
      if (wfr) out.push_back(Make(defs::kWriteFollowsReads, g, g.version, *wfr));
    } else if (g.kind == EventKind::kSvSnapshot) {
      const int group = GroupOf(events, g.node);
      if (group < 0) continue;
      const int p = group % partitions;
      const auto applied = AppliedAt(events, g.node, g.seq);
      for (DcId d = 0; d < dcs && static_cast<size_t>(d) < g.sv.size(); ++d) {
        std::set<LogIndex> origin;
        for (const auto& e : events) {
          if (e.seq >= g.seq) break;
          if (e.kind != EventKind::kPutCommittedAtServer || e.version.dc != d) continue;
          const int eg = GroupOf(events, e.node);
          if (eg >= 0 && eg % partitions == p && eg / partitions == d) origin.insert(e.version.idx);
        }
        for (LogIndex i : origin) {
          if (i <= g.sv[d] && !applied.count(VersionId{d, i}) &&
              lemma_reported[g.node].insert(VersionId{d, i}).second) {
            Violation v = Make(defs::kStableVector, g, VersionId{d, i}, 0);
            out.push_back(v);
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sgkv
