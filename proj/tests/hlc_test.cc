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
#include <utility>
#include <vector>

#include "sgkv/hlc.h"

namespace sgkv {
namespace {

// Reference receive rule on plain pairs, written out branch by branch.
std::pair<uint64_t, uint64_t> RefMerge(std::pair<uint64_t, uint64_t> cur,
                                       std::pair<uint64_t, uint64_t> msg, uint64_t pt) {
  const auto [lp, cp] = cur;
  const auto [lm, cm] = msg;
  if (pt > lp && pt > lm) return {pt, 0};
  if (lp == lm) {
    return {lp, std::max(cp, cm) + 1};
  }
  if (lp > lm) return {lp, cp + 1};
  return {lm, cm + 1};
}

HlcTimestamp T(uint64_t l, uint64_t c) { return HlcTimestamp(l, c); }

TEST(HlcTimestamp, PackingKeepsLexicographicOrder) {
  EXPECT_EQ(T(5, 0), T(5, 0));
  EXPECT_LT(T(5, 9), T(6, 0));
  EXPECT_LT(T(5, 1), T(5, 2));
  EXPECT_LT(T(0, 0), T(0, 1));
  EXPECT_TRUE(HlcTimestamp{}.is_zero());
  EXPECT_EQ(T(HlcTimestamp::kMaxPhysical, 7).l(), HlcTimestamp::kMaxPhysical);
  EXPECT_EQ(T(HlcTimestamp::kMaxPhysical, 7).c(), 7u);
  EXPECT_LT(T(1, HlcTimestamp::kMaxCounter), T(2, 0));
}

TEST(HlcClock, AdvanceLocalExamples) {
  HlcClock a(T(10, 3));
  EXPECT_EQ(a.AdvanceLocal(5), T(10, 4));
  HlcClock b(T(10, 3));
  EXPECT_EQ(b.AdvanceLocal(20), T(20, 0));
  HlcClock z;
  EXPECT_EQ(z.AdvanceLocal(0), T(0, 1));
}

TEST(HlcClock, MergeExamples) {
  HlcClock a(T(10, 4));
  EXPECT_EQ(a.Merge(T(10, 2), 5), T(10, 5));
  HlcClock b(T(10, 7));
  EXPECT_EQ(b.Merge(T(0, 0), 20), T(20, 0));
  HlcClock c(T(5, 1));
  EXPECT_EQ(c.Merge(T(9, 6), 3), T(9, 7));
  HlcClock d(T(95, 1));
  EXPECT_EQ(d.Merge(T(100, 2), 90), T(100, 3));
  HlcClock e(T(40, 0));
  EXPECT_EQ(e.Merge(T(0, 0), 50), T(50, 0));
}

TEST(HlcClock, CounterOverflowIsFatal) {
  HlcClock a(T(10, HlcTimestamp::kMaxCounter));
  EXPECT_THROW(a.AdvanceLocal(3), HlcOverflow);
  EXPECT_EQ(a.current(), T(10, HlcTimestamp::kMaxCounter));
  HlcClock b;
  EXPECT_THROW(b.Merge(T(4, HlcTimestamp::kMaxCounter), 1), HlcOverflow);
}

TEST(HlcClock, MatchesReferenceOnRandomInputs) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 20000; ++round) {
    const uint64_t lp = rng() % 40, cp = rng() % 10, lm = rng() % 40, cm = rng() % 10;
    const uint64_t pt = rng() % 40;
    HlcClock clock(T(lp, cp));
    const auto got = clock.Merge(T(lm, cm), pt);
    const auto want = RefMerge({lp, cp}, {lm, cm}, pt);
    ASSERT_EQ(got, T(want.first, want.second)) << lp << "," << cp << " " << lm << "," << cm
                                               << " pt=" << pt;
  }
}

// Random message DAG over several clocks with skewed physical time.
TEST(HlcClock, MonotonicAndCapturesHappensBefore) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    constexpr int kNodes = 5;
    std::vector<HlcClock> clocks(kNodes);
    std::vector<HlcTimestamp> last(kNodes);
    std::vector<int64_t> offset(kNodes);
    for (auto& o : offset) o = static_cast<int64_t>(rng() % 201) - 100;
    std::vector<std::pair<int, HlcTimestamp>> in_flight;
    uint64_t max_pt = 0;
    for (int step = 0; step < 2000; ++step) {
      const int n = static_cast<int>(rng() % kNodes);
      const uint64_t pt = static_cast<uint64_t>(std::max<int64_t>(0, step + 200 + offset[n]));
      max_pt = std::max(max_pt, pt);
      HlcTimestamp out;
      HlcTimestamp remote;
      if (!in_flight.empty() && rng() % 2 == 0) {
        const size_t pick = rng() % in_flight.size();
        remote = in_flight[pick].second;
        in_flight.erase(in_flight.begin() + static_cast<long>(pick));
        out = clocks[n].Merge(remote, pt);
        ASSERT_GT(out, remote);
      } else {
        out = clocks[n].AdvanceLocal(pt);
      }
      ASSERT_GT(out, last[n]);
      ASSERT_GE(out.l(), pt);
      ASSERT_LE(out.l(), max_pt);
      last[n] = out;
      if (rng() % 3 == 0) in_flight.emplace_back(n, out);
    }
  }
}

}  // namespace
}  // namespace sgkv
