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

#include "sgkv/simnet.h"

namespace sgkv {
namespace {

TEST(ClockModel, PhysicalNowExamples) {
  ClockModel m({{0, 0.0}, {Millis(50), 0.0}, {0, 0.01}, {Millis(-30), 0.0}});
  EXPECT_EQ(m.PhysicalNowMs(0, Millis(100)), 100u);
  EXPECT_EQ(m.PhysicalNowMs(1, Millis(100)), 150u);
  EXPECT_EQ(m.PhysicalNowMs(2, Millis(1000)), 1010u);
  EXPECT_EQ(m.PhysicalNowMs(3, Millis(10)), 0u);
  EXPECT_EQ(m.PhysicalNowMs(0, 1999), 1u);  // rounds down
}

TEST(ClockModel, RandomRespectsBoundsAndIsMonotonic) {
  std::mt19937_64 rng(1);
  auto m = ClockModel::Random(50, Millis(100), 0.001, rng);
  for (int n = 0; n < 50; ++n) {
    EXPECT_LE(std::abs(m.clock(n).offset), Millis(100));
    EXPECT_LE(std::abs(m.clock(n).drift), 0.001);
    uint64_t prev = 0;
    for (SimTime t = 0; t < Millis(500); t += 137) {
      const uint64_t now = m.PhysicalNowMs(n, t);
      ASSERT_GE(now, prev);
      prev = now;
    }
  }
}

TEST(Topology, NodeLayout) {
  Topology t(2, 3, 3, 4);
  EXPECT_EQ(t.server_count(), 2 * 3 * 4);
  EXPECT_EQ(t.client_count(), 8);
  EXPECT_EQ(t.Xc(1, 2), t.Group(1, 2) * 4 + 3);
  EXPECT_TRUE(t.IsXc(t.Xc(1, 2)));
  EXPECT_FALSE(t.IsXc(t.Replica(1, 2, 0)));
  EXPECT_EQ(t.DcOf(t.Replica(1, 2, 1)), 1);
  EXPECT_EQ(t.PartitionOfNode(t.Replica(1, 2, 1)), 2);
  EXPECT_EQ(t.Voters(0, 1).size(), 3u);
  EXPECT_EQ(t.DcOf(t.ClientNode(5)), 1);
  EXPECT_TRUE(t.IsClient(t.ClientNode(0)));
}

TEST(EventLoop, EqualTimesRunInInsertionOrder) {
  EventLoop loop;
  std::vector<int> order;
  for (int i = 0; i < 5; ++i) loop.Schedule(10, [&, i] { order.push_back(i); });
  loop.Schedule(5, [&] { order.push_back(-1); });
  EXPECT_EQ(loop.RunUntil(100), 6u);
  EXPECT_EQ(order, (std::vector<int>{-1, 0, 1, 2, 3, 4}));
  EXPECT_EQ(loop.now(), 100);
}

TEST(EventLoop, RunUntilConditionAndLimit) {
  EventLoop loop;
  int count = 0;
  std::function<void()> tick = [&] {
    ++count;
    loop.ScheduleAfter(10, tick);
  };
  loop.Schedule(0, tick);
  auto r = loop.RunUntil([&] { return count == 7; }, 1000);
  EXPECT_TRUE(r.reached);
  EXPECT_EQ(r.events, 7u);
  r = loop.RunUntil([] { return false; }, 200);
  EXPECT_FALSE(r.reached);
  EXPECT_LE(loop.now(), 200);

  EventLoop empty;
  EXPECT_FALSE(empty.RunUntil([] { return false; }, 1000).reached);
}

TEST(EventLoop, PastSchedulingClampsToNow) {
  EventLoop loop;
  loop.RunUntil(50);
  SimTime seen = -1;
  loop.Schedule(10, [&] { seen = loop.now(); });
  loop.RunUntil(60);
  EXPECT_EQ(seen, 50);
}

struct NetFixture {
  Topology topo{2, 1, 3, 1};
  EventLoop loop;
  VectorTraceSink trace;
  std::vector<std::pair<NodeId, LogIndex>> got;

  std::unique_ptr<Network> Make(ChannelModel model, uint64_t seed) {
    return std::make_unique<Network>(
        loop, topo, model, seed,
        [this](NodeId, NodeId to, Message m) {
          if (auto* r = std::get_if<Replicate>(&m)) got.emplace_back(to, r->payload.origin_idx);
        },
        &trace);
  }

  Replicate Rep(LogIndex i) {
    Replicate r;
    r.payload.origin_idx = i;
    return r;
  }
};

TEST(Network, CrossDcFifoUnderJitter) {
  NetFixture f;
  ChannelModel m;
  m.xdc_jitter = Millis(6);
  auto net = f.Make(m, 3);
  const NodeId a = f.topo.Xc(0, 0), b = f.topo.Replica(1, 0, 0);
  for (LogIndex i = 1; i <= 200; ++i) {
    net->Send(a, b, f.Rep(i));
    f.loop.RunUntil(f.loop.now() + 100);
  }
  f.loop.RunUntil(f.loop.now() + Millis(50));
  ASSERT_EQ(f.got.size(), 200u);
  for (size_t i = 0; i < f.got.size(); ++i) EXPECT_EQ(f.got[i].second, i + 1);
  EXPECT_EQ(net->app_in_flight(), 0u);
  uint64_t prev = 0;
  bool first = true;
  for (const auto& e : f.trace.events()) {
    ASSERT_EQ(e.kind, EventKind::kXdcDeliver);
    if (!first) EXPECT_GT(e.log_idx, prev);
    prev = e.log_idx;
    first = false;
  }
}

TEST(Network, WithoutFifoJitterReorders) {
  NetFixture f;
  ChannelModel m;
  m.xdc_jitter = Millis(6);
  m.fifo = false;
  auto net = f.Make(m, 3);
  const NodeId a = f.topo.Xc(0, 0), b = f.topo.Replica(1, 0, 0);
  for (LogIndex i = 1; i <= 200; ++i) {
    net->Send(a, b, f.Rep(i));
    f.loop.RunUntil(f.loop.now() + 100);
  }
  f.loop.RunUntil(f.loop.now() + Millis(50));
  ASSERT_EQ(f.got.size(), 200u);
  size_t inversions = 0;
  for (size_t i = 1; i < f.got.size(); ++i) inversions += f.got[i].second < f.got[i - 1].second;
  EXPECT_GT(inversions, 0u);
}

TEST(Network, CrossDcDelayAndNoLoss) {
  NetFixture f;
  ChannelModel m;
  m.drop_prob = 1.0;  // applies to intra-DC Raft traffic only
  auto net = f.Make(m, 3);
  net->Send(f.topo.Xc(0, 0), f.topo.Replica(1, 0, 0), f.Rep(1));
  f.loop.RunUntil(Millis(7.5) - 1);
  EXPECT_TRUE(f.got.empty());
  f.loop.RunUntil(Millis(7.5));
  EXPECT_EQ(f.got.size(), 1u);
}

TEST(Network, IntraDcRaftLossAndDuplication) {
  NetFixture f;
  size_t raft_msgs = 0;
  auto count = [&](double drop, double dup) {
    raft_msgs = 0;
    EventLoop loop;
    ChannelModel m;
    m.drop_prob = drop;
    m.dup_prob = dup;
    Network net(loop, f.topo, m, 9, [&](NodeId, NodeId, Message) { ++raft_msgs; }, nullptr);
    for (int i = 0; i < 1000; ++i) {
      net.Send(0, 1, raft::Message{raft::RequestVote{}});
    }
    loop.RunUntil(Millis(10));
    return raft_msgs;
  };
  EXPECT_EQ(count(0, 0), 1000u);
  const size_t lossy = count(0.2, 0);
  EXPECT_GT(lossy, 700u);
  EXPECT_LT(lossy, 900u);
  const size_t dup = count(0, 0.2);
  EXPECT_GT(dup, 1100u);
  EXPECT_LT(dup, 1300u);
}

TEST(Random, Uniform01Range) {
  std::mt19937_64 rng(1);
  double lo = 1, hi = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = Uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const int64_t k = UniformInt(rng, -3, 3);
    ASSERT_GE(k, -3);
    ASSERT_LE(k, 3);
  }
  EXPECT_LT(lo, 0.01);
  EXPECT_GT(hi, 0.99);
}

}  // namespace
}  // namespace sgkv
