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

#include "sgkv/simnet.h"

#include <cmath>
#include <stdexcept>

namespace sgkv {

Topology::Topology(int dcs, int partitions, int replicas, int clients_per_dc)
    : dcs_(dcs), partitions_(partitions), replicas_(replicas), clients_per_dc_(clients_per_dc) {
  if (dcs < 1 || partitions < 1 || replicas < 1 || clients_per_dc < 0) {
    throw std::invalid_argument("topology needs dcs, partitions, replicas >= 1");
  }
}

std::vector<NodeId> Topology::Voters(DcId d, PartitionId p) const {
  std::vector<NodeId> v;
  for (int r = 0; r < replicas_; ++r) v.push_back(Replica(d, p, r));
  return v;
}

DcId Topology::DcOf(NodeId n) const {
  if (IsServer(n)) return GroupOfNode(n) / partitions_;
  if (IsClient(n)) return DcOfClient(ClientOfNode(n));
  throw std::out_of_range("unknown node id");
}

ClockModel ClockModel::Random(int nodes, SimTime max_skew, double max_drift,
                              std::mt19937_64& rng) {
  std::vector<NodeClock> clocks(static_cast<size_t>(nodes));
  for (auto& c : clocks) {
    c.offset = max_skew > 0 ? UniformInt(rng, -max_skew, max_skew) : 0;
    c.drift = max_drift > 0 ? (2.0 * Uniform01(rng) - 1.0) * max_drift : 0.0;
  }
  return ClockModel(std::move(clocks));
}

uint64_t ClockModel::PhysicalNowMs(NodeId node, SimTime sim_time) const {
  SimTime us = sim_time;
  if (static_cast<size_t>(node) < clocks_.size()) {
    const NodeClock& c = clocks_[node];
    us += std::llround(static_cast<double>(sim_time) * c.drift) + c.offset;
  }
  return us <= 0 ? 0 : static_cast<uint64_t>(us / 1000);
}

void EventLoop::Schedule(SimTime at, Action action) {
  if (at < now_) at = now_;
  queue_.push(Event{at, next_seq_++, std::move(action)});
}

bool EventLoop::StepOne() {
  if (queue_.empty()) return false;
  // priority_queue::top is const; the action is moved out via a const_cast
  // because the element is popped immediately.
  Event& top = const_cast<Event&>(queue_.top());
  now_ = top.at;
  Action action = std::move(top.action);
  queue_.pop();
  ++executed_;
  action();
  return true;
}

uint64_t EventLoop::RunUntil(SimTime until) {
  uint64_t n = 0;
  while (!queue_.empty() && queue_.top().at <= until) {
    StepOne();
    ++n;
  }
  if (now_ < until) now_ = until;
  return n;
}

EventLoop::RunResult EventLoop::RunUntil(const std::function<bool()>& done, SimTime limit) {
  RunResult r;
  if (done()) {
    r.reached = true;
    return r;
  }
  while (!queue_.empty() && queue_.top().at <= limit) {
    StepOne();
    ++r.events;
    if (done()) {
      r.reached = true;
      return r;
    }
  }
  return r;
}

Network::Network(EventLoop& loop, const Topology& topology, ChannelModel model, uint64_t seed,
                 Deliver deliver, TraceSink* trace)
    : loop_(loop),
      topology_(topology),
      model_(model),
      rng_(seed),
      deliver_(std::move(deliver)),
      trace_(trace) {}

void Network::Send(NodeId from, NodeId to, Message msg) {
  ++sent_;
  const bool is_raft = std::holds_alternative<raft::Message>(msg);
  const bool cross = topology_.DcOf(from) != topology_.DcOf(to);

  if (!cross) {
    int copies = 1;
    if (is_raft) {
      if (model_.drop_prob > 0 && Uniform01(rng_) < model_.drop_prob) {
        ++dropped_;
        return;
      }
      if (model_.dup_prob > 0 && Uniform01(rng_) < model_.dup_prob) copies = 2;
    }
    for (int i = 0; i < copies; ++i) {
      const SimTime delay = UniformInt(rng_, model_.intra_min, model_.intra_max);
      if (!is_raft) ++app_in_flight_;
      Message copy = (i + 1 == copies) ? std::move(msg) : msg;
      loop_.Schedule(loop_.now() + delay,
                     [this, from, to, is_raft, m = std::move(copy)]() mutable {
                       if (!is_raft) --app_in_flight_;
                       deliver_(from, to, std::move(m));
                     });
    }
    return;
  }

  Channel& ch = channels_[{from, to}];
  const uint64_t seq = ch.next_send++;
  const SimTime jitter = model_.xdc_jitter > 0 ? UniformInt(rng_, 0, model_.xdc_jitter) : 0;
  ++app_in_flight_;
  loop_.Schedule(loop_.now() + model_.xdc_delay + jitter,
                 [this, from, to, seq, m = std::move(msg)]() mutable {
                   Arrive(from, to, seq, std::move(m));
                 });
}

void Network::Arrive(NodeId from, NodeId to, uint64_t seq, Message msg) {
  if (!model_.fifo) {
    Hand(from, to, seq, std::move(msg));
    return;
  }
  Channel& ch = channels_[{from, to}];
  ch.held.emplace(seq, std::move(msg));
  while (!ch.held.empty() && ch.held.begin()->first == ch.next_deliver) {
    auto node = ch.held.extract(ch.held.begin());
    ++ch.next_deliver;
    Hand(from, to, node.key(), std::move(node.mapped()));
  }
}

void Network::Hand(NodeId from, NodeId to, uint64_t seq, Message msg) {
  --app_in_flight_;
  if (trace_ != nullptr) {
    if (const auto* r = std::get_if<Replicate>(&msg)) {
      TraceEvent e;
      e.kind = EventKind::kXdcDeliver;
      e.time = loop_.now();
      e.node = to;
      e.peer = from;
      e.log_idx = seq;
      e.version = {r->payload.origin_dc, r->payload.origin_idx};
      e.key = r->payload.key;
      trace_->Record(std::move(e));
    }
  }
  deliver_(from, to, std::move(msg));
}

}  // namespace sgkv
