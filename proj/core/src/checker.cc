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

#include "sgkv/checker.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace sgkv {

bool operator<(const Violation& a, const Violation& b) {
  return std::tie(a.seq, a.def, a.offending, a.witness_seq, a.server, a.key) <
         std::tie(b.seq, b.def, b.offending, b.witness_seq, b.server, b.key);
}

namespace {

using VersionSet = std::unordered_set<VersionId, VersionIdHash>;

uint64_t OpKey(ClientId c, RequestId r) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(c)) << 40) ^ r;
}

struct IssueInfo {
  uint64_t seq = 0;
  std::string key;
  OpKind op = OpKind::kGet;
  WriteLevel write_level = WriteLevel::kEventual;
  size_t reads_prefix = 0;
  size_t writes_prefix = 0;
};

// Distinct versions a client has read / had acknowledged for one key, in
// first-seen order, so a prefix length captures the set at any instant.
struct History {
  std::vector<VersionId> reads;
  std::vector<VersionId> writes;
  VersionSet read_set;
  VersionSet write_set;
};

struct ServerState {
  int group = -1;
  std::unordered_map<std::string, VersionSet> committed;
  VersionSet applied;
  std::unordered_map<std::string, std::unordered_map<VersionId, uint64_t, VersionIdHash>> forbid_mw;
  std::unordered_map<std::string, std::unordered_map<VersionId, uint64_t, VersionIdHash>>
      forbid_wfr;
  std::vector<LogIndex> frontier;
  std::vector<bool> dirty;
  std::vector<std::set<LogIndex>> missing;
  VersionSet lemma_reported;

  void Reset(int dcs) {
    committed.clear();
    applied.clear();
    forbid_mw.clear();
    forbid_wfr.clear();
    frontier.assign(static_cast<size_t>(dcs), 0);
    dirty.assign(static_cast<size_t>(dcs), false);
    missing.assign(static_cast<size_t>(dcs), {});
    lemma_reported.clear();
  }
};

struct Snapshot {
  bool found = false;
  VersionId version;
  HlcTimestamp t;
  std::string digest;
  bool operator==(const Snapshot&) const = default;
};

struct FinalState {
  int group = -1;
  IndexVector sv;
  std::map<std::string, Snapshot> keys;
};

std::string VersionText(VersionId v) {
  return std::to_string(v.dc) + ":" + std::to_string(v.idx);
}

class Checker {
 public:
  Checker(int dcs, int partitions, const CheckOptions& options)
      : dcs_(dcs), partitions_(partitions), options_(options) {}

  CheckReport Run(const std::vector<TraceEvent>& events) {
    if (!events.empty()) last_seq_ = events.back().seq;
    for (const TraceEvent& e : events) Step(e);
    CheckConvergence();
    std::sort(report_.violations.begin(), report_.violations.end());
    for (const auto& v : report_.violations) ++report_.counts[v.def];
    report_.events = events.size();
    return std::move(report_);
  }

 private:
  ServerState& Server(const TraceEvent& e) {
    auto [it, inserted] = servers_.try_emplace(e.node);
    if (inserted) {
      it->second.Reset(dcs_);
      it->second.group = e.group;
      if (e.group >= 0) partition_servers_[e.group % partitions_].push_back(e.node);
    } else if (it->second.group < 0 && e.group >= 0) {
      it->second.group = e.group;
      partition_servers_[e.group % partitions_].push_back(e.node);
    }
    return it->second;
  }

  History& Hist(ClientId c, const std::string& key) { return history_[c][key]; }

  void Report(std::string_view def, const TraceEvent& e, VersionId offending, uint64_t witness,
              std::string detail = {}) {
    Violation v;
    v.def = std::string(def);
    v.seq = e.seq;
    v.time = e.time;
    v.client = e.client;
    v.server = e.node;
    v.key = e.key;
    v.offending = offending;
    v.witness_seq = witness;
    v.detail = std::move(detail);
    report_.violations.push_back(std::move(v));
  }

  void Step(const TraceEvent& e) {
    switch (e.kind) {
      case EventKind::kGetIssued:
      case EventKind::kPutIssued: {
        History& h = Hist(e.client, e.key);
        IssueInfo info;
        info.seq = e.seq;
        info.key = e.key;
        info.op = e.kind == EventKind::kGetIssued ? OpKind::kGet : OpKind::kPut;
        info.write_level = e.write_level;
        info.reads_prefix = h.reads.size();
        info.writes_prefix = h.writes.size();
        issues_[OpKey(e.client, e.req)] = std::move(info);
        break;
      }
      case EventKind::kGetReplied:
        if (e.found) {
          History& h = Hist(e.client, e.key);
          if (h.read_set.insert(e.version).second) h.reads.push_back(e.version);
        }
        break;
      case EventKind::kPutReplied: {
        History& h = Hist(e.client, e.key);
        if (h.write_set.insert(e.version).second) h.writes.push_back(e.version);
        break;
      }
      case EventKind::kPutCommittedAtServer:
        OnCommitted(e);
        break;
      case EventKind::kGetServed:
        OnServed(e);
        break;
      case EventKind::kSvSnapshot:
        OnSnapshot(e);
        break;
      case EventKind::kCrash: {
        auto it = servers_.find(e.node);
        if (it != servers_.end()) it->second.Reset(dcs_);
        break;
      }
      case EventKind::kCommitApplied: {
        auto key = std::make_pair(e.group, e.log_idx);
        auto [it, inserted] = commits_.try_emplace(key, std::make_pair(e.term, e.version));
        if (!inserted && it->second != std::make_pair(e.term, e.version)) {
          Report(defs::kCommitSafety, e, e.version, 0,
                 "group " + std::to_string(e.group) + " index " + std::to_string(e.log_idx) +
                     " applied with different entries");
        }
        break;
      }
      case EventKind::kBecameLeader: {
        auto [it, inserted] = leaders_.try_emplace(std::make_pair(e.group, e.term), e.node);
        if (!inserted && it->second != e.node) {
          Report(defs::kElectionSafety, e, {}, 0,
                 "group " + std::to_string(e.group) + " term " + std::to_string(e.term) +
                     " leaders " + std::to_string(it->second) + " and " + std::to_string(e.node));
        }
        break;
      }
      case EventKind::kXdcDeliver: {
        auto key = std::make_pair(e.peer, e.node);
        auto it = channels_.find(key);
        if (it != channels_.end() && e.log_idx <= it->second) {
          Report(defs::kFifo, e, e.version, 0,
                 "channel " + std::to_string(e.peer) + "->" + std::to_string(e.node) + " seq " +
                     std::to_string(e.log_idx) + " after " + std::to_string(it->second));
        }
        channels_[key] = it == channels_.end() ? e.log_idx : std::max(it->second, e.log_idx);
        break;
      }
      case EventKind::kParked:
        (e.op == OpKind::kPut ? report_.parked_puts : report_.parked_gets)++;
        break;
      case EventKind::kFinalSnapshot: {
        FinalState& f = finals_[e.node];
        f.group = e.group;
        if (e.key.empty()) {
          f.sv = e.sv;
        } else {
          f.keys[e.key] = Snapshot{e.found, e.version, e.t, e.detail};
        }
        break;
      }
      case EventKind::kOpTimeout:
      case EventKind::kRestart:
        break;
    }
  }

  void OnCommitted(const TraceEvent& e) {
    ServerState& s = Server(e);
    s.committed[e.key].insert(e.version);
    s.applied.insert(e.version);
    if (e.version.dc >= 0 && static_cast<size_t>(e.version.dc) < s.missing.size()) {
      s.missing[e.version.dc].erase(e.version.idx);
    }

    if (s.group >= 0 && s.group / partitions_ == e.version.dc) {
      const int p = s.group % partitions_;
      auto& origin = origins_[{p, e.version.dc}];
      if (origin.insert(e.version.idx).second) {
        for (NodeId other : partition_servers_[p]) {
          ServerState& o = servers_.at(other);
          if (o.frontier[e.version.dc] >= e.version.idx) o.dirty[e.version.dc] = true;
        }
      }
    }

    auto it = issues_.find(OpKey(e.client, e.req));
    if (it == issues_.end() || it->second.op != OpKind::kPut || it->second.key != e.key) return;
    const IssueInfo& issue = it->second;
    const History& h = Hist(e.client, e.key);
    auto forbid = [&](auto& table, const std::vector<VersionId>& list, size_t prefix) {
      auto& m = table[e.key];
      for (size_t i = 0; i < prefix && i < list.size(); ++i) {
        if (list[i] == e.version) continue;
        uint64_t& w = m[list[i]];
        w = std::max(w, issue.seq);
      }
    };
    if (options_.all_ops || RequiresMonotonicWrite(issue.write_level)) {
      forbid(s.forbid_mw, h.writes, issue.writes_prefix);
    }
    if (options_.all_ops || RequiresWriteFollowsReads(issue.write_level)) {
      forbid(s.forbid_wfr, h.reads, issue.reads_prefix);
    }
  }

  void OnServed(const TraceEvent& e) {
    ServerState& s = Server(e);
    const VersionSet& committed = s.committed[e.key];
    if (e.found && !committed.count(e.version)) Report(defs::kCommittedReads, e, e.version, 0);

    auto it = issues_.find(OpKey(e.client, e.req));
    if (it != issues_.end() && it->second.op == OpKind::kGet && it->second.key == e.key) {
      const IssueInfo& issue = it->second;
      const History& h = Hist(e.client, e.key);
      if (options_.all_ops || RequiresMonotonicRead(e.read_level)) {
        for (size_t i = 0; i < issue.reads_prefix; ++i) {
          if (!committed.count(h.reads[i])) {
            Report(defs::kMonotonicRead, e, h.reads[i], issue.seq);
          }
        }
      }
      if (options_.all_ops || RequiresReadYourWrite(e.read_level)) {
        for (size_t i = 0; i < issue.writes_prefix; ++i) {
          if (!committed.count(h.writes[i])) {
            Report(defs::kReadYourWrite, e, h.writes[i], issue.seq);
          }
        }
      }
    }

    if (!e.found) return;
    auto check = [&](auto& table, std::string_view def) {
      auto t = table.find(e.key);
      if (t == table.end()) return;
      auto f = t->second.find(e.version);
      if (f != t->second.end()) Report(def, e, e.version, f->second);
    };
    check(s.forbid_mw, defs::kMonotonicWrite);
    check(s.forbid_wfr, defs::kWriteFollowsReads);
  }

  void OnSnapshot(const TraceEvent& e) {
    ServerState& s = Server(e);
    if (s.group < 0) return;
    const int p = s.group % partitions_;
    for (DcId d = 0; d < dcs_ && static_cast<size_t>(d) < e.sv.size(); ++d) {
      const LogIndex sv = e.sv[d];
      auto oit = origins_.find({p, d});
      if (sv < s.frontier[d] || s.dirty[d]) {
        s.frontier[d] = 0;
        s.missing[d].clear();
        s.dirty[d] = false;
      }
      if (oit != origins_.end() && sv > s.frontier[d]) {
        const auto& origin = oit->second;
        for (auto i = origin.upper_bound(s.frontier[d]); i != origin.end() && *i <= sv; ++i) {
          if (!s.applied.count(VersionId{d, *i})) s.missing[d].insert(*i);
        }
      }
      s.frontier[d] = std::max(s.frontier[d], sv);
      // Each unapplied write is reported at the first snapshot that covers it.
      for (LogIndex idx : s.missing[d]) {
        if (s.lemma_reported.insert(VersionId{d, idx}).second) {
          Report(defs::kStableVector, e, VersionId{d, idx}, 0,
                 "sv[" + std::to_string(d) + "]=" + std::to_string(sv));
        }
      }
    }
  }

  void CheckConvergence() {
    std::map<int, std::vector<NodeId>> by_partition;
    for (const auto& [node, f] : finals_) by_partition[f.group % partitions_].push_back(node);
    for (const auto& [p, nodes] : by_partition) {
      const NodeId ref = nodes.front();
      const FinalState& rf = finals_.at(ref);
      std::set<std::string> keys;
      for (NodeId n : nodes) {
        for (const auto& [k, snap] : finals_.at(n).keys) keys.insert(k);
      }
      for (NodeId n : nodes) {
        const FinalState& f = finals_.at(n);
        TraceEvent at;
        at.node = n;
        at.seq = last_seq_;
        if (f.sv != rf.sv) Report(defs::kConvergence, at, {}, 0, "stable vector differs from node " + std::to_string(ref));
        for (const auto& k : keys) {
          auto a = rf.keys.find(k);
          auto b = f.keys.find(k);
          const Snapshot sa = a == rf.keys.end() ? Snapshot{} : a->second;
          const Snapshot sb = b == f.keys.end() ? Snapshot{} : b->second;
          at.key = k;
          if (!(sa == sb)) {
            Report(defs::kConvergence, at, sb.version, 0,
                   "winner differs from node " + std::to_string(ref) + " (" +
                       VersionText(sa.version) + ")");
            continue;
          }
          auto sr = servers_.find(ref);
          auto sn = servers_.find(n);
          static const VersionSet kEmpty;
          auto committed = [&](decltype(sr) it) -> const VersionSet& {
            if (it == servers_.end()) return kEmpty;
            auto c = it->second.committed.find(k);
            return c == it->second.committed.end() ? kEmpty : c->second;
          };
          if (committed(sr) != committed(sn)) {
            Report(defs::kConvergence, at, sb.version, 0,
                   "committed version set differs from node " + std::to_string(ref));
          }
        }
      }
    }
  }

  int dcs_;
  int partitions_;
  CheckOptions options_;
  CheckReport report_;
  uint64_t last_seq_ = 0;

  std::unordered_map<uint64_t, IssueInfo> issues_;
  std::unordered_map<ClientId, std::unordered_map<std::string, History>> history_;
  std::map<NodeId, ServerState> servers_;
  std::map<int, std::vector<NodeId>> partition_servers_;
  std::map<std::pair<int, DcId>, std::set<LogIndex>> origins_;
  std::map<std::pair<int, LogIndex>, std::pair<Term, VersionId>> commits_;
  std::map<std::pair<int, Term>, NodeId> leaders_;
  std::map<std::pair<NodeId, NodeId>, LogIndex> channels_;
  std::map<NodeId, FinalState> finals_;
};

}  // namespace

CheckReport CheckTrace(const std::vector<TraceEvent>& events, int dcs, int partitions,
                       const CheckOptions& options) {
  Checker checker(dcs, partitions, options);
  return checker.Run(events);
}

std::vector<Violation> OnlyDef(const std::vector<Violation>& all, std::string_view def) {
  std::vector<Violation> out;
  for (const auto& v : all) {
    if (v.def == def) out.push_back(v);
  }
  return out;
}

std::vector<Violation> CheckMonotonicRead(const std::vector<TraceEvent>& events, int dcs,
                                          int partitions, const CheckOptions& options) {
  return OnlyDef(CheckTrace(events, dcs, partitions, options).violations, defs::kMonotonicRead);
}

std::vector<Violation> CheckReadYourWrite(const std::vector<TraceEvent>& events, int dcs,
                                          int partitions, const CheckOptions& options) {
  return OnlyDef(CheckTrace(events, dcs, partitions, options).violations, defs::kReadYourWrite);
}

std::vector<Violation> CheckMonotonicWrite(const std::vector<TraceEvent>& events, int dcs,
                                           int partitions, const CheckOptions& options) {
  return OnlyDef(CheckTrace(events, dcs, partitions, options).violations, defs::kMonotonicWrite);
}

std::vector<Violation> CheckWriteFollowsReads(const std::vector<TraceEvent>& events, int dcs,
                                              int partitions, const CheckOptions& options) {
  return OnlyDef(CheckTrace(events, dcs, partitions, options).violations,
                 defs::kWriteFollowsReads);
}

std::vector<Violation> CheckConvergenceAndCommittedReads(const std::vector<TraceEvent>& events,
                                                         int dcs, int partitions) {
  auto all = CheckTrace(events, dcs, partitions).violations;
  auto r1 = OnlyDef(all, defs::kConvergence);
  auto r2 = OnlyDef(all, defs::kCommittedReads);
  r1.insert(r1.end(), r2.begin(), r2.end());
  std::sort(r1.begin(), r1.end());
  return r1;
}

std::vector<Violation> CheckStableVectorLemma(const std::vector<TraceEvent>& events, int dcs,
                                              int partitions) {
  return OnlyDef(CheckTrace(events, dcs, partitions).violations, defs::kStableVector);
}

std::string FormatReport(const CheckReport& report) {
  std::ostringstream os;
  os << "# schema " << kViolationSchema << '\n';
  os << "summary events=" << report.events << " violations=" << report.violations.size()
     << " parked_gets=" << report.parked_gets << " parked_puts=" << report.parked_puts;
  for (const auto& [def, n] : report.counts) os << ' ' << def << '=' << n;
  os << '\n';
  for (const auto& v : report.violations) {
    os << "violation def=" << v.def << " seq=" << v.seq << " time_ms=" << ToMillis(v.time)
       << " client=" << v.client << " server=" << v.server << " key=" << v.key
       << " offending=" << VersionText(v.offending) << " witness_seq=" << v.witness_seq;
    if (!v.detail.empty()) os << " detail=\"" << v.detail << '"';
    os << '\n';
  }
  return os.str();
}

}  // namespace sgkv
