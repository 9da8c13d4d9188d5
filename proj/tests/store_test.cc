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

#include <algorithm>
#include <random>

#include "sgkv/store.h"

namespace sgkv {
namespace {

raft::LogEntry Entry(const std::string& key, DcId origin, LogIndex origin_idx, HlcTimestamp t,
                     const std::string& value = "v") {
  raft::LogEntry e;
  e.term = 1;
  ReplicationPayload p;
  p.key = key;
  p.version = Version{value, t, origin};
  p.origin_dc = origin;
  p.origin_idx = origin_idx;
  e.payload = p;
  return e;
}

TEST(Store, LocalCommitSetsOwnComponent) {
  Store s(0, 2);
  EXPECT_EQ(s.ApplyCommit(Entry("k", 0, kUnassigned, {5, 0}), 1), ApplyResult::kApplied);
  EXPECT_EQ(s.sv(), (IndexVector{1, 0}));
  ASSERT_NE(s.ReadLatest("k"), nullptr);
  EXPECT_EQ(s.ReadLatest("k")->origin_idx, 1u);
}

TEST(Store, RemoteDuplicateIsDropped) {
  Store s(1, 2);
  s.ApplyCommit(Entry("a", 1, kUnassigned, {1, 0}), 1);
  s.ApplyCommit(Entry("b", 1, kUnassigned, {2, 0}), 2);
  s.ApplyCommit(Entry("c", 0, 5, {3, 0}), 3);
  ASSERT_EQ(s.sv(), (IndexVector{5, 2}));
  EXPECT_EQ(s.ApplyCommit(Entry("d", 0, 4, {9, 0}), 4), ApplyResult::kDeduplicated);
  EXPECT_EQ(s.sv(), (IndexVector{5, 2}));
  EXPECT_EQ(s.ReadLatest("d"), nullptr);
}

TEST(Store, FirstRemoteWrite) {
  Store s(0, 2);
  EXPECT_EQ(s.ApplyCommit(Entry("k", 1, 1, {1, 0}), 1), ApplyResult::kApplied);
  EXPECT_EQ(s.sv(), (IndexVector{0, 1}));
}

TEST(Store, OutOfOrderCommitIsFatal) {
  Store s(0, 2);
  s.ApplyCommit(Entry("k", 0, kUnassigned, {1, 0}), 2);
  EXPECT_THROW(s.ApplyCommit(Entry("k", 0, kUnassigned, {2, 0}), 2), InvariantViolation);
  EXPECT_THROW(s.ApplyCommit(Entry("k", 1, kUnassigned, {2, 0}), 3), InvariantViolation);
}

TEST(Store, NoOpEntriesOnlyAdvanceTheCursor) {
  Store s(0, 2);
  raft::LogEntry noop{1, 1, std::nullopt};
  EXPECT_EQ(s.ApplyCommit(noop, 1), ApplyResult::kNoOp);
  EXPECT_EQ(s.sv(), (IndexVector{0, 0}));
}

TEST(Store, ReadLatestExamples) {
  Store s(0, 2);
  s.ApplyCommit(Entry("k", 0, kUnassigned, {5, 0}), 1);
  s.ApplyCommit(Entry("k", 1, 1, {7, 1}), 2);
  EXPECT_EQ(s.ReadLatest("k")->version.t, HlcTimestamp(7, 1));

  Store tie(0, 2);
  tie.ApplyCommit(Entry("k", 1, 1, {5, 2}, "from1"), 1);
  tie.ApplyCommit(Entry("k", 0, kUnassigned, {5, 2}, "from0"), 2);
  EXPECT_EQ(tie.ReadLatest("k")->version.dc_id, 1);
  EXPECT_EQ(tie.ReadLatest("k")->version.value, "from1");

  EXPECT_EQ(s.ReadLatest("missing"), nullptr);
}

TEST(Store, GcKeepsWinnerPlusWindow) {
  Store s(0, 1, 100);
  for (LogIndex i = 1; i <= 10; ++i) {
    s.ApplyCommit(Entry("k", 0, kUnassigned, {(i * 7) % 11, 0}), i);
  }
  const HlcTimestamp winner = s.ReadLatest("k")->version.t;
  Store w4 = s;
  // Rebuild with a window of 4.
  Store g(0, 1, 4);
  for (LogIndex i = 1; i <= 10; ++i) {
    g.ApplyCommit(Entry("k", 0, kUnassigned, {(i * 7) % 11, 0}), i);
  }
  EXPECT_EQ(g.Chain("k")->size(), 5u);
  EXPECT_EQ(g.ReadLatest("k")->version.t, winner);

  EXPECT_EQ(w4.GcChain("k"), 10u);

  Store one(0, 1, 4);
  one.ApplyCommit(Entry("k", 0, kUnassigned, {1, 0}), 1);
  EXPECT_EQ(one.GcChain("k"), 1u);

  Store zero(0, 1, 0);
  for (LogIndex i = 1; i <= 3; ++i) zero.ApplyCommit(Entry("k", 0, kUnassigned, {i, 0}), i);
  EXPECT_EQ(zero.Chain("k")->size(), 1u);
  EXPECT_EQ(zero.ReadLatest("k")->version.t, HlcTimestamp(3, 0));
}

// Any arrival order of the same versions yields the same winner.
TEST(Store, WinnerIsOrderIndependent) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 200; ++round) {
    std::vector<raft::LogEntry> entries;
    for (LogIndex i = 1; i <= 6; ++i) {
      entries.push_back(Entry("k", static_cast<DcId>(rng() % 3 == 0 ? 1 : 2), i,
                              {rng() % 4, rng() % 3}, std::to_string(i)));
    }
    std::vector<std::string> winners;
    for (int perm = 0; perm < 4; ++perm) {
      // Random interleaving that keeps each origin's stream in index order.
      std::vector<raft::LogEntry> a, b;
      for (const auto& e : entries) (e.payload->origin_dc == 1 ? a : b).push_back(e);
      Store s(0, 3, 2);
      LogIndex local = 0;
      size_t i = 0, j = 0;
      while (i < a.size() || j < b.size()) {
        const bool take_a = j == b.size() || (i < a.size() && rng() % 2 == 0);
        s.ApplyCommit(take_a ? a[i++] : b[j++], ++local);
      }
      winners.push_back(s.ReadLatest("k")->version.value);
    }
    for (const auto& w : winners) ASSERT_EQ(w, winners.front());
  }
}

}  // namespace
}  // namespace sgkv
