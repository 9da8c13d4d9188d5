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


#include <gtest/gtest.h>

#include "random_trace.h"
#include "sgkv/checker.h"
#include "sgkv/oracle.h"

namespace sgkv {
namespace {

// Servers 0,1 are in DC0 (group 0); servers 4,5 in DC1 (group 1).
class TraceBuilder {
 public:
  TraceBuilder& Issue(ClientId c, RequestId req, OpKind op, const std::string& key,
                      ReadLevel rl = ReadLevel::kEventual,
                      WriteLevel wl = WriteLevel::kEventual) {
    TraceEvent e;
    e.kind = op == OpKind::kGet ? EventKind::kGetIssued : EventKind::kPutIssued;
    e.client = c;
    e.req = req;
    e.op = op;
    e.key = key;
    e.read_level = rl;
    e.write_level = wl;
    return Add(e);
  }
  TraceBuilder& Commit(NodeId n, const std::string& key, VersionId v, ClientId writer = 99,
                       RequestId req = 0) {
    TraceEvent e;
    e.kind = EventKind::kPutCommittedAtServer;
    e.node = n;
    e.group = n / 4;
    e.key = key;
    e.version = v;
    e.client = writer;
    e.req = req;
    return Add(e);
  }
  TraceBuilder& Serve(NodeId n, ClientId c, RequestId req, const std::string& key,
                      std::optional<VersionId> v, ReadLevel rl = ReadLevel::kEventual) {
    TraceEvent e;
    e.kind = EventKind::kGetServed;
    e.node = n;
    e.group = n / 4;
    e.client = c;
    e.req = req;
    e.key = key;
    e.read_level = rl;
    e.found = v.has_value();
    if (v) e.version = *v;
    return Add(e);
  }
  TraceBuilder& GetReply(ClientId c, RequestId req, const std::string& key,
                         std::optional<VersionId> v) {
    TraceEvent e;
    e.kind = EventKind::kGetReplied;
    e.client = c;
    e.req = req;
    e.key = key;
    e.found = v.has_value();
    if (v) e.version = *v;
    return Add(e);
  }
  TraceBuilder& PutReply(ClientId c, RequestId req, const std::string& key, VersionId v) {
    TraceEvent e;
    e.kind = EventKind::kPutReplied;
    e.client = c;
    e.req = req;
    e.key = key;
    e.version = v;
    return Add(e);
  }
  TraceBuilder& Snapshot(NodeId n, IndexVector sv) {
    TraceEvent e;
    e.kind = EventKind::kSvSnapshot;
    e.node = n;
    e.group = n / 4;
    e.sv = std::move(sv);
    return Add(e);
  }
  TraceBuilder& Final(NodeId n, IndexVector sv, const std::string& key, VersionId v,
                      const std::string& digest) {
    TraceEvent m;
    m.kind = EventKind::kFinalSnapshot;
    m.node = n;
    m.group = n / 4;
    m.sv = sv;
    Add(m);
    TraceEvent e = m;
    e.sv.clear();
    e.key = key;
    e.found = true;
    e.version = v;
    e.detail = digest;
    return Add(e);
  }
  TraceBuilder& Add(TraceEvent e) {
    e.seq = events_.size();
    e.time = static_cast<SimTime>(events_.size()) * 10;
    events_.push_back(std::move(e));
    return *this;
  }
  const std::vector<TraceEvent>& events() const { return events_; }

 private:
  std::vector<TraceEvent> events_;
};

constexpr VersionId V05{0, 5};

// c0 reads (0,5) at DC0, then a monotonic read at DC1 is served before (0,5)
// arrived there.
TraceBuilder MonotonicReadTrace(bool deferred) {
  TraceBuilder b;
  b.Commit(0, "k", V05)
      .Issue(0, 1, OpKind::kGet, "k")
      .Serve(0, 0, 1, "k", V05)
      .GetReply(0, 1, "k", V05)
      .Issue(0, 2, OpKind::kGet, "k", ReadLevel::kMonotonicRead);
  if (deferred) b.Commit(4, "k", V05);
  b.Serve(4, 0, 2, "k", deferred ? std::optional<VersionId>(V05) : std::nullopt,
          ReadLevel::kMonotonicRead);
  return b;
}

TEST(Checker, MonotonicReadViolation) {
  const auto events = MonotonicReadTrace(false).events();
  ASSERT_EQ(events.size(), 6u);
  const auto v = CheckMonotonicRead(events, 2, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].def, defs::kMonotonicRead);
  EXPECT_EQ(v[0].offending, V05);
  EXPECT_EQ(v[0].server, 4);
  EXPECT_EQ(v[0].witness_seq, 4u);
  EXPECT_EQ(OracleCheck(events, 2, 1), CheckTrace(events, 2, 1).violations);
}

TEST(Checker, MonotonicReadDeferredServeIsClean) {
  const auto events = MonotonicReadTrace(true).events();
  EXPECT_TRUE(CheckTrace(events, 2, 1).clean());
  EXPECT_TRUE(OracleCheck(events, 2, 1).empty());
}

TEST(Checker, EventualReadIsNotCheckedUnlessAllOps) {
  TraceBuilder b;
  b.Commit(0, "k", V05)
      .Issue(0, 1, OpKind::kGet, "k")
      .Serve(0, 0, 1, "k", V05)
      .GetReply(0, 1, "k", V05)
      .Issue(0, 2, OpKind::kGet, "k")
      .Serve(4, 0, 2, "k", std::nullopt);
  EXPECT_TRUE(CheckTrace(b.events(), 2, 1).clean());
  EXPECT_EQ(CheckTrace(b.events(), 2, 1, {true}).count(defs::kMonotonicRead), 1u);
}

TEST(Checker, SingleServerHistoryIsClean) {
  TraceBuilder b;
  b.Commit(0, "k", {0, 1})
      .Issue(0, 1, OpKind::kGet, "k", ReadLevel::kMonotonicReadYourWrite)
      .Serve(0, 0, 1, "k", VersionId{0, 1}, ReadLevel::kMonotonicReadYourWrite)
      .GetReply(0, 1, "k", VersionId{0, 1})
      .Commit(0, "k", {0, 2})
      .Issue(0, 2, OpKind::kGet, "k", ReadLevel::kMonotonicReadYourWrite)
      .Serve(0, 0, 2, "k", VersionId{0, 2}, ReadLevel::kMonotonicReadYourWrite);
  EXPECT_TRUE(CheckTrace(b.events(), 2, 1, {true}).clean());
}

TraceBuilder ReadYourWriteTrace(bool parked) {
  TraceBuilder b;
  b.Issue(0, 1, OpKind::kPut, "k")
      .Commit(0, "k", {0, 1}, 0, 1)
      .PutReply(0, 1, "k", {0, 1})
      .Issue(0, 2, OpKind::kGet, "k", ReadLevel::kReadYourWrite);
  if (parked) b.Commit(4, "k", {0, 1}, 0, 1);
  b.Serve(4, 0, 2, "k", parked ? std::optional<VersionId>(VersionId{0, 1}) : std::nullopt,
          ReadLevel::kReadYourWrite);
  return b;
}

TEST(Checker, ReadYourWrite) {
  const auto bad = ReadYourWriteTrace(false).events();
  const auto v = CheckReadYourWrite(bad, 2, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].offending, (VersionId{0, 1}));
  EXPECT_TRUE(CheckReadYourWrite(ReadYourWriteTrace(true).events(), 2, 1).empty());
  // Same leader, right after the write.
  TraceBuilder b;
  b.Issue(0, 1, OpKind::kPut, "k")
      .Commit(0, "k", {0, 1}, 0, 1)
      .PutReply(0, 1, "k", {0, 1})
      .Issue(0, 2, OpKind::kGet, "k", ReadLevel::kReadYourWrite)
      .Serve(0, 0, 2, "k", VersionId{0, 1}, ReadLevel::kReadYourWrite);
  EXPECT_TRUE(CheckTrace(b.events(), 2, 1).clean());
}

// Two writes by c0; the second (MW) loses at server 4, which still returns the first.
TEST(Checker, MonotonicWrite) {
  TraceBuilder b;
  b.Issue(0, 1, OpKind::kPut, "pw")
      .Commit(0, "pw", {0, 1}, 0, 1)
      .PutReply(0, 1, "pw", {0, 1})
      .Commit(4, "pw", {0, 1}, 0, 1)
      .Issue(0, 2, OpKind::kPut, "pw", ReadLevel::kEventual, WriteLevel::kMonotonicWrite)
      .Commit(4, "pw", {1, 1}, 0, 2)
      .PutReply(0, 2, "pw", {1, 1})
      .Issue(1, 1, OpKind::kGet, "pw")
      .Serve(4, 1, 1, "pw", VersionId{0, 1});
  const auto v = CheckMonotonicWrite(b.events(), 2, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].offending, (VersionId{0, 1}));
  EXPECT_EQ(v[0].witness_seq, 4u);
  EXPECT_EQ(v[0].client, 1);
  EXPECT_EQ(OracleCheck(b.events(), 2, 1), CheckTrace(b.events(), 2, 1).violations);
  // A server that has not committed O is not constrained.
  TraceBuilder c;
  c.Issue(0, 1, OpKind::kPut, "pw")
      .Commit(0, "pw", {0, 1}, 0, 1)
      .PutReply(0, 1, "pw", {0, 1})
      .Issue(0, 2, OpKind::kPut, "pw", ReadLevel::kEventual, WriteLevel::kMonotonicWrite)
      .Commit(4, "pw", {1, 1}, 0, 2)
      .Issue(1, 1, OpKind::kGet, "pw")
      .Serve(0, 1, 1, "pw", VersionId{0, 1});
  EXPECT_TRUE(CheckTrace(c.events(), 2, 1).clean());
}

TEST(Checker, WriteFollowsReads) {
  TraceBuilder b;
  b.Commit(4, "doc", {1, 3})
      .Commit(0, "doc", {1, 3})
      .Issue(0, 1, OpKind::kGet, "doc")
      .Serve(4, 0, 1, "doc", VersionId{1, 3})
      .GetReply(0, 1, "doc", VersionId{1, 3})
      .Issue(0, 2, OpKind::kPut, "doc", ReadLevel::kEventual, WriteLevel::kWriteFollowsReads)
      .Commit(0, "doc", {0, 2}, 0, 2)
      .Issue(2, 1, OpKind::kGet, "doc")
      .Serve(0, 2, 1, "doc", VersionId{1, 3});
  const auto v = CheckWriteFollowsReads(b.events(), 2, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].offending, (VersionId{1, 3}));
  EXPECT_EQ(v[0].witness_seq, 5u);
  EXPECT_TRUE(CheckMonotonicWrite(b.events(), 2, 1).empty());
}

TEST(Checker, CommittedReads) {
  TraceBuilder b;
  b.Issue(0, 1, OpKind::kGet, "k").Serve(0, 0, 1, "k", VersionId{1, 9});
  const auto v = CheckConvergenceAndCommittedReads(b.events(), 2, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].def, defs::kCommittedReads);
}

TEST(Checker, CrashForgetsCommittedState) {
  TraceBuilder b;
  b.Commit(0, "k", {0, 1});
  TraceEvent crash;
  crash.kind = EventKind::kCrash;
  crash.node = 0;
  crash.group = 0;
  b.Add(crash);
  b.Issue(0, 1, OpKind::kGet, "k").Serve(0, 0, 1, "k", VersionId{0, 1});
  EXPECT_EQ(CheckTrace(b.events(), 2, 1).count(defs::kCommittedReads), 1u);
  EXPECT_EQ(OracleCheck(b.events(), 2, 1), CheckTrace(b.events(), 2, 1).violations);
}

TEST(Checker, StableVectorLemma) {
  TraceBuilder b;
  b.Commit(0, "a", {0, 1}).Commit(0, "b", {0, 2}).Snapshot(0, {2, 0});
  b.Commit(1, "b", {0, 2}).Snapshot(1, {2, 0}).Snapshot(1, {2, 0});
  const auto v = CheckStableVectorLemma(b.events(), 2, 1);
  ASSERT_EQ(v.size(), 1u);  // reported once per server incarnation
  EXPECT_EQ(v[0].server, 1);
  EXPECT_EQ(v[0].offending, (VersionId{0, 1}));
  EXPECT_EQ(OracleCheck(b.events(), 2, 1), CheckTrace(b.events(), 2, 1).violations);
  EXPECT_TRUE(CheckStableVectorLemma({}, 2, 1).empty());
}

TEST(Checker, StableVectorLemmaLateOrigin) {
  // Server 1 covers index 3 before the origin has even committed index 2.
  TraceBuilder b;
  b.Commit(0, "a", {0, 1}).Commit(1, "a", {0, 1}).Commit(0, "c", {0, 3});
  b.Commit(1, "c", {0, 3}).Snapshot(1, {3, 0});
  EXPECT_TRUE(CheckStableVectorLemma(b.events(), 2, 1).empty());
  b.Commit(0, "b", {0, 2}).Snapshot(1, {3, 0});
  EXPECT_EQ(CheckStableVectorLemma(b.events(), 2, 1).size(), 1u);
  EXPECT_EQ(OracleCheck(b.events(), 2, 1), CheckTrace(b.events(), 2, 1).violations);
}

TEST(Checker, Convergence) {
  TraceBuilder same;
  same.Commit(0, "k", {0, 1}).Commit(4, "k", {0, 1});
  same.Final(0, {1, 0}, "k", {0, 1}, "aa").Final(4, {1, 0}, "k", {0, 1}, "aa");
  EXPECT_TRUE(CheckTrace(same.events(), 2, 1).clean());

  TraceBuilder diff;
  diff.Commit(0, "k", {0, 1}).Commit(4, "k", {0, 1});
  diff.Final(0, {1, 0}, "k", {0, 1}, "aa").Final(4, {1, 0}, "k", {0, 1}, "bb");
  EXPECT_GE(CheckTrace(diff.events(), 2, 1).count(defs::kConvergence), 1u);

  TraceBuilder sv;
  sv.Commit(0, "k", {0, 1}).Commit(4, "k", {0, 1});
  sv.Final(0, {1, 0}, "k", {0, 1}, "aa").Final(4, {1, 1}, "k", {0, 1}, "aa");
  EXPECT_GE(CheckTrace(sv.events(), 2, 1).count(defs::kConvergence), 1u);

  TraceBuilder solo;
  solo.Commit(0, "k", {0, 1}).Final(0, {1}, "k", {0, 1}, "aa");
  EXPECT_TRUE(CheckTrace(solo.events(), 1, 1).clean());
}

TEST(Checker, RaftAndChannelSafety) {
  TraceBuilder b;
  TraceEvent lead;
  lead.kind = EventKind::kBecameLeader;
  lead.group = 0;
  lead.term = 3;
  lead.node = 0;
  b.Add(lead);
  lead.node = 1;
  b.Add(lead);
  TraceEvent c;
  c.kind = EventKind::kCommitApplied;
  c.group = 0;
  c.log_idx = 4;
  c.term = 3;
  c.version = {0, 4};
  b.Add(c);
  c.version = {1, 2};
  b.Add(c);
  TraceEvent x;
  x.kind = EventKind::kXdcDeliver;
  x.peer = 3;
  x.node = 4;
  x.log_idx = 5;
  b.Add(x);
  x.log_idx = 4;
  b.Add(x);
  const auto r = CheckTrace(b.events(), 2, 1);
  EXPECT_EQ(r.count(defs::kElectionSafety), 1u);
  EXPECT_EQ(r.count(defs::kCommitSafety), 1u);
  EXPECT_EQ(r.count(defs::kFifo), 1u);
}

TEST(Checker, ReportFormat) {
  const auto r = CheckTrace(MonotonicReadTrace(false).events(), 2, 1);
  const std::string text = FormatReport(r);
  EXPECT_EQ(text.rfind("# schema sgkv-violations/1\n", 0), 0u) << text;
  EXPECT_NE(text.find("MR"), std::string::npos);
}

TEST(Oracle, SetsOnSmallTraces) {
  const auto events = MonotonicReadTrace(false).events();
  const auto sets = OracleReplay(events, events.size());
  EXPECT_EQ(sets.client_reads.at({0, "k"}), (std::set<VersionId>{V05}));
  EXPECT_EQ(sets.committed_writes.at({0, "k"}), (std::set<VersionId>{V05}));
  EXPECT_FALSE(sets.committed_writes.count({4, "k"}));
  EXPECT_EQ(CommittedWritesAt(events, 4, "k", events.size()).size(), 0u);

  const auto empty = OracleReplay({}, 0);
  EXPECT_TRUE(empty.committed_writes.empty());
  EXPECT_TRUE(empty.client_writes.empty());
  EXPECT_TRUE(empty.client_reads.empty());

  TraceBuilder b;
  b.Issue(0, 1, OpKind::kPut, "k")
      .Commit(0, "k", {0, 1}, 0, 1)
      .PutReply(0, 1, "k", {0, 1})
      .Issue(0, 2, OpKind::kGet, "k")
      .Serve(0, 0, 2, "k", VersionId{0, 1})
      .GetReply(0, 2, "k", VersionId{0, 1});
  const auto s = OracleReplay(b.events(), b.events().size());
  EXPECT_EQ(s.client_reads.at({0, "k"}), (std::set<VersionId>{{0, 1}}));
  EXPECT_EQ(s.client_writes.at({0, "k"}), (std::set<VersionId>{{0, 1}}));
}

std::vector<Violation> SessionDefs(const std::vector<Violation>& all) {
  std::vector<Violation> out;
  for (const auto& v : all) {
    if (v.def == defs::kMonotonicRead || v.def == defs::kReadYourWrite ||
        v.def == defs::kMonotonicWrite || v.def == defs::kWriteFollowsReads ||
        v.def == defs::kCommittedReads || v.def == defs::kStableVector) {
      out.push_back(v);
    }
  }
  return out;
}

TEST(Oracle, AgreesWithCheckerOnRandomTraces) {
  size_t nonempty = 0;
  for (uint64_t seed = 0; seed < 150; ++seed) {
    const auto events = testing::RandomTraceBuilder(seed).Build(200);
    for (bool all : {false, true}) {
      const auto fast = SessionDefs(CheckTrace(events, 2, 1, {all}).violations);
      const auto slow = OracleCheck(events, 2, 1, {all});
      ASSERT_EQ(fast, slow) << "seed " << seed << " all_ops " << all;
      nonempty += !slow.empty();
    }
  }
  EXPECT_GT(nonempty, 100u);
}

}  // namespace
}  // namespace sgkv
