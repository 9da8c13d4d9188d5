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

#include "sgkv/server.h"

#include <algorithm>

namespace sgkv {

std::string_view ToString(ReplyStatus s) {
  switch (s) {
    case ReplyStatus::kOk:
      return "ok";
    case ReplyStatus::kNotFound:
      return "not_found";
    case ReplyStatus::kNotLeader:
      return "not_leader";
    case ReplyStatus::kWrongPartition:
      return "wrong_partition";
    case ReplyStatus::kTimeout:
      return "timeout";
  }
  return "?";
}

std::string_view Tag(const Message& m) {
  struct {
    std::string_view operator()(const raft::Message& r) const { return raft::Tag(r); }
    std::string_view operator()(const GetRequest&) const { return "GetReq"; }
    std::string_view operator()(const GetReply&) const { return "GetReply"; }
    std::string_view operator()(const PutRequest&) const { return "PutReq"; }
    std::string_view operator()(const PutReply&) const { return "PutReply"; }
    std::string_view operator()(const Replicate&) const { return "Replicate"; }
    std::string_view operator()(const ReplicateAck&) const { return "ReplicateAck"; }
  } visitor;
  return std::visit(visitor, m);
}

bool MustBlock(const IndexVector& sv, const IndexVector& hrv, const IndexVector& hwv) {
  for (size_t i = 0; i < sv.size(); ++i) {
    if (i < hrv.size() && sv[i] < hrv[i]) return true;
    if (i < hwv.size() && sv[i] < hwv[i]) return true;
  }
  return false;
}

std::vector<PendingTable::Entry> PendingTable::Release(const IndexVector& sv) {
  std::vector<Entry> ready;
  auto keep = entries_.begin();
  for (auto it = entries_.begin(); it != entries_.end(); ++it) {
    if (MustBlock(sv, it->hrv, it->hwv)) {
      if (keep != it) *keep = std::move(*it);
      ++keep;
    } else {
      ready.push_back(std::move(*it));
    }
  }
  entries_.erase(keep, entries_.end());
  return ready;
}

std::vector<PendingTable::Entry> PendingTable::Expire(SimTime deadline) {
  std::vector<Entry> expired;
  auto keep = entries_.begin();
  for (auto it = entries_.begin(); it != entries_.end(); ++it) {
    if (it->parked_at > deadline) {
      if (keep != it) *keep = std::move(*it);
      ++keep;
    } else {
      expired.push_back(std::move(*it));
    }
  }
  entries_.erase(keep, entries_.end());
  return expired;
}

// ---------------------------------------------------------------------------
// DataServer

DataServer::DataServer(NodeId id, Options options, raft::Node raft)
    : id_(id),
      options_(std::move(options)),
      raft_(std::move(raft)),
      store_(options_.dc, options_.dcs, options_.gc_window),
      last_origin_in_log_(static_cast<size_t>(options_.dcs), 0) {}

void DataServer::Emit(const ServerContext& ctx, TraceEvent e) const {
  if (ctx.trace == nullptr) return;
  e.time = ctx.now;
  if (e.node == kNoNode) e.node = id_;
  if (e.group < 0) e.group = options_.dc * options_.partitions + options_.partition;
  ctx.trace->Record(std::move(e));
}

ServerOutput DataServer::HandleGet(const GetRequest& req, const ServerContext& ctx) {
  ServerOutput result;
  if (PartitionOfKey(req.key, options_.partitions) != options_.partition) {
    GetReply reply;
    reply.client = req.client;
    reply.req = req.req;
    reply.server = id_;
    reply.status = ReplyStatus::kWrongPartition;
    result.messages.push_back({req.reply_to, std::move(reply)});
    return result;
  }
  if (MustBlock(store_.sv(), req.hrv, req.hwv)) {
    TraceEvent e;
    e.kind = EventKind::kParked;
    e.client = req.client;
    e.req = req.req;
    e.key = req.key;
    e.op = OpKind::kGet;
    e.read_level = req.level;
    Emit(ctx, std::move(e));
    pending_.Park({ctx.now, req.hrv, req.hwv, req});
    return result;
  }
  Serve(req, ctx, result);
  return result;
}

void DataServer::Serve(const GetRequest& req, const ServerContext& ctx, ServerOutput& result) {
  GetReply reply;
  reply.client = req.client;
  reply.req = req.req;
  reply.server = id_;
  const StoredVersion* v = store_.ReadLatest(req.key);
  if (v == nullptr) {
    reply.status = ReplyStatus::kNotFound;
  } else {
    reply.status = ReplyStatus::kOk;
    reply.value = v->version.value;
    reply.dc_id = v->version.dc_id;
    reply.log_idx = store_.sv(v->version.dc_id);
    reply.t = v->version.t;
    reply.version = v->id();
  }

  TraceEvent e;
  e.kind = EventKind::kGetServed;
  e.client = req.client;
  e.req = req.req;
  e.key = req.key;
  e.read_level = req.level;
  e.found = v != nullptr;
  e.version = reply.version;
  e.t = reply.t;
  e.log_idx = reply.log_idx;
  e.dc = reply.dc_id;
  e.sv = store_.sv();
  Emit(ctx, std::move(e));

  result.messages.push_back({req.reply_to, std::move(reply)});
}

ServerOutput DataServer::HandlePut(const PutRequest& req, const ServerContext& ctx) {
  ServerOutput result;
  if (PartitionOfKey(req.key, options_.partitions) != options_.partition) {
    PutReply reply;
    reply.client = req.client;
    reply.req = req.req;
    reply.server = id_;
    reply.status = ReplyStatus::kWrongPartition;
    result.messages.push_back({req.reply_to, std::move(reply)});
    return result;
  }
  if (req.blocking && is_leader() &&
      MustBlock(store_.sv(), req.blocking->hrv, req.blocking->hwv)) {
    TraceEvent e;
    e.kind = EventKind::kParked;
    e.client = req.client;
    e.req = req.req;
    e.key = req.key;
    e.op = OpKind::kPut;
    e.write_level = req.level;
    Emit(ctx, std::move(e));
    pending_.Park({ctx.now, req.blocking->hrv, req.blocking->hwv, req});
    return result;
  }
  StampAndPropose(req, ctx, result);
  return result;
}

HlcTimestamp DataServer::PhysicalStamp(const std::string& key, uint64_t physical_ms) {
  auto successor = [](HlcTimestamp t) {
    if (t.c() == HlcTimestamp::kMaxCounter) throw HlcOverflow("physical stamp counter overflow");
    return HlcTimestamp(t.l(), t.c() + 1);
  };
  HlcTimestamp t = physical_ms > last_physical_stamp_.l() ? HlcTimestamp(physical_ms, 0)
                                                          : successor(last_physical_stamp_);
  // Order the write after every version this server already holds for the
  // key. Combined with the blocking wait this is what orders a session's
  // writes without HLC.
  if (const StoredVersion* w = store_.ReadLatest(key); w != nullptr && w->version.t >= t) {
    t = successor(w->version.t);
  }
  last_physical_stamp_ = t;
  return t;
}

void DataServer::StampAndPropose(const PutRequest& req, const ServerContext& ctx,
                                 ServerOutput& result) {
  auto reject = [&] {
    PutReply reply;
    reply.client = req.client;
    reply.req = req.req;
    reply.server = id_;
    reply.status = ReplyStatus::kNotLeader;
    reply.leader_hint = raft_.leader_hint();
    result.messages.push_back({req.reply_to, std::move(reply)});
  };
  if (!is_leader()) {
    reject();
    return;
  }

  const HlcTimestamp t =
      options_.hlc_mode ? hlc_.Merge(req.dt, ctx.physical_ms) : PhysicalStamp(req.key, ctx.physical_ms);

  ReplicationPayload payload;
  payload.key = req.key;
  payload.version = Version{req.value, t, options_.dc};
  payload.origin_dc = options_.dc;
  payload.origin_idx = kUnassigned;
  payload.writer = req.client;
  payload.writer_req = req.req;

  raft::Output out;
  auto proposed = raft_.Propose(std::move(payload), ctx.now, out);
  if (const auto* accepted = std::get_if<raft::Accepted>(&proposed)) {
    pending_puts_[accepted->index] = PendingPut{accepted->term, req, t};
  } else {
    reject();
  }
  Absorb(std::move(out), ctx, result);
}

LogIndex DataServer::LastOriginInLog(DcId origin) {
  const auto& log = raft_.log();
  const bool truncated = scanned_upto_ > log.size() ||
                         (scanned_upto_ > 0 && log[scanned_upto_ - 1].term != scanned_term_);
  if (truncated) {
    scanned_upto_ = 0;
    std::fill(last_origin_in_log_.begin(), last_origin_in_log_.end(), 0);
  }
  for (; scanned_upto_ < log.size(); ++scanned_upto_) {
    const raft::LogEntry& e = log[scanned_upto_];
    if (!e.payload) continue;
    const DcId d = e.payload->origin_dc;
    const LogIndex idx = e.payload->origin_idx == kUnassigned ? e.index : e.payload->origin_idx;
    last_origin_in_log_[d] = std::max(last_origin_in_log_[d], idx);
  }
  if (scanned_upto_ > 0) scanned_term_ = log[scanned_upto_ - 1].term;
  return last_origin_in_log_.at(origin);
}

ServerOutput DataServer::HandleReplicate(const Replicate& msg, const ServerContext& ctx) {
  ServerOutput result;
  if (!is_leader()) {
    auto hint = raft_.leader_hint();
    if (!msg.forwarded && hint && *hint != id_) {
      Replicate fwd = msg;
      fwd.forwarded = true;
      result.messages.push_back({*hint, std::move(fwd)});
    }
    return result;
  }

  const DcId origin = msg.payload.origin_dc;
  auto ack = [&] {
    ReplicateAck a;
    a.origin_dc = origin;
    a.receiver_dc = options_.dc;
    a.partition = options_.partition;
    a.acked = store_.sv(origin);
    a.from = id_;
    result.messages.push_back({msg.from, a});
  };
  if (options_.fifo) {
    const LogIndex last = LastOriginInLog(origin);
    if (msg.payload.origin_idx <= last || msg.prev_origin_idx != last) {
      // Duplicate or a gap left by a lost message; the sender retransmits.
      ack();
      return result;
    }
  }
  raft::Output out;
  raft_.Propose(msg.payload, ctx.now, out);
  Absorb(std::move(out), ctx, result);
  return result;
}

ServerOutput DataServer::HandleRaft(const raft::Message& msg, const ServerContext& ctx) {
  ServerOutput result;
  Absorb(raft_.Handle(msg, ctx.now), ctx, result);
  return result;
}

ServerOutput DataServer::Tick(const ServerContext& ctx) {
  ServerOutput result;
  Absorb(raft_.Tick(ctx.now), ctx, result);
  if (options_.park_timeout > 0 && !pending_.empty()) {
    for (auto& entry : pending_.Expire(ctx.now - options_.park_timeout)) {
      std::visit(
          [&](const auto& req) {
            using R = std::decay_t<decltype(req)>;
            TraceEvent e;
            e.kind = EventKind::kOpTimeout;
            e.client = req.client;
            e.req = req.req;
            e.key = req.key;
            e.detail = "park_timeout";
            if constexpr (std::is_same_v<R, GetRequest>) {
              e.op = OpKind::kGet;
              GetReply reply;
              reply.client = req.client;
              reply.req = req.req;
              reply.server = id_;
              reply.status = ReplyStatus::kTimeout;
              result.messages.push_back({req.reply_to, std::move(reply)});
            } else {
              e.op = OpKind::kPut;
              PutReply reply;
              reply.client = req.client;
              reply.req = req.req;
              reply.server = id_;
              reply.status = ReplyStatus::kTimeout;
              result.messages.push_back({req.reply_to, std::move(reply)});
            }
            Emit(ctx, std::move(e));
          },
          entry.request);
    }
  }
  return result;
}

void DataServer::Absorb(raft::Output&& out, const ServerContext& ctx, ServerOutput& result) {
  for (auto& env : out.messages) result.messages.push_back({env.to, std::move(env.msg)});
  if (out.became_leader) {
    result.became_leader = true;
    TraceEvent e;
    e.kind = EventKind::kBecameLeader;
    e.group = options_.dc * options_.partitions + options_.partition;
    e.term = raft_.term();
    Emit(ctx, std::move(e));
  }
  for (const raft::LogEntry& entry : out.committed) {
    ServerOutput sub = OnCommit(entry, ctx);
    for (auto& m : sub.messages) result.messages.push_back(std::move(m));
  }
}

ServerOutput DataServer::OnCommit(const raft::LogEntry& entry, const ServerContext& ctx) {
  ServerOutput result;
  const ApplyResult applied = store_.ApplyCommit(entry, entry.index);

  TraceEvent commit;
  commit.kind = EventKind::kCommitApplied;
  commit.group = options_.dc * options_.partitions + options_.partition;
  commit.log_idx = entry.index;
  commit.term = entry.term;
  if (entry.payload) {
    commit.key = entry.payload->key;
    commit.version = {entry.payload->origin_dc, entry.payload->origin_idx == kUnassigned
                                                    ? entry.index
                                                    : entry.payload->origin_idx};
    commit.t = entry.payload->version.t;
  }
  commit.detail = applied == ApplyResult::kDeduplicated ? "dedup" : "";
  Emit(ctx, commit);

  if (applied == ApplyResult::kApplied) {
    const ReplicationPayload& p = *entry.payload;
    TraceEvent e;
    e.kind = EventKind::kPutCommittedAtServer;
    e.client = p.writer;
    e.req = p.writer_req;
    e.key = p.key;
    e.version = commit.version;
    e.t = p.version.t;
    Emit(ctx, std::move(e));

    TraceEvent snap;
    snap.kind = EventKind::kSvSnapshot;
    snap.sv = store_.sv();
    Emit(ctx, std::move(snap));

    ReleaseParked(ctx, result);
  }

  if (entry.payload && entry.payload->origin_dc != options_.dc && is_leader() &&
      applied != ApplyResult::kNoOp) {
    const DcId origin = entry.payload->origin_dc;
    ReplicateAck a;
    a.origin_dc = origin;
    a.receiver_dc = options_.dc;
    a.partition = options_.partition;
    a.acked = store_.sv(origin);
    a.from = id_;
    if (static_cast<size_t>(origin) < options_.xc_of_dc.size()) {
      result.messages.push_back({options_.xc_of_dc[origin], a});
    }
  }

  if (auto it = pending_puts_.find(entry.index); it != pending_puts_.end()) {
    if (it->second.term == entry.term) {
      const PutRequest& req = it->second.request;
      PutReply reply;
      reply.client = req.client;
      reply.req = req.req;
      reply.server = id_;
      reply.status = ReplyStatus::kOk;
      reply.dc_id = options_.dc;
      reply.log_idx = entry.index;
      reply.t = it->second.t;
      result.messages.push_back({req.reply_to, std::move(reply)});
    }
    pending_puts_.erase(it);
  }
  return result;
}

void DataServer::ReleaseParked(const ServerContext& ctx, ServerOutput& result) {
  if (pending_.empty()) return;
  for (auto& entry : pending_.Release(store_.sv())) {
    if (auto* get = std::get_if<GetRequest>(&entry.request)) {
      Serve(*get, ctx, result);
    } else {
      StampAndPropose(std::get<PutRequest>(entry.request), ctx, result);
    }
  }
}

void DataServer::Crash() {
  store_.Clear();
  pending_.Clear();
  pending_puts_.clear();
  hlc_ = HlcClock{};
  last_physical_stamp_ = HlcTimestamp{};
  scanned_upto_ = 0;
  scanned_term_ = 0;
  std::fill(last_origin_in_log_.begin(), last_origin_in_log_.end(), 0);
}

void DataServer::Restart(SimTime now) { raft_.Restart(now); }

// ---------------------------------------------------------------------------
// XcServer

XcServer::XcServer(NodeId id, Options options, raft::Node raft)
    : id_(id),
      options_(options),
      raft_(std::move(raft)),
      streams_(static_cast<size_t>(options.dcs)) {}

ServerOutput XcServer::HandleRaft(const raft::Message& msg, const ServerContext& ctx) {
  ServerOutput result;
  raft::Output out = raft_.Handle(msg, ctx.now);
  for (auto& env : out.messages) result.messages.push_back({env.to, std::move(env.msg)});
  for (const raft::LogEntry& entry : out.committed) {
    if (ctx.trace != nullptr) {
      TraceEvent e;
      e.kind = EventKind::kCommitApplied;
      e.time = ctx.now;
      e.node = id_;
      e.group = options_.dc * options_.partitions + options_.partition;
      e.log_idx = entry.index;
      e.term = entry.term;
      if (entry.payload) {
        e.key = entry.payload->key;
        e.version = {entry.payload->origin_dc, entry.payload->origin_idx == kUnassigned
                                                   ? entry.index
                                                   : entry.payload->origin_idx};
        e.t = entry.payload->version.t;
      }
      ctx.trace->Record(std::move(e));
    }
    for (auto& m : OnCommit(entry, ctx)) result.messages.push_back(std::move(m));
  }
  return result;
}

std::vector<Outbound> XcServer::OnCommit(const raft::LogEntry& entry, const ServerContext& ctx) {
  std::vector<Outbound> out;
  if (!entry.payload || entry.payload->origin_dc != options_.dc) return out;

  ReplicationPayload p = *entry.payload;
  if (p.origin_idx == kUnassigned) p.origin_idx = entry.index;
  const LogIndex previous_last = last_outgoing();
  outgoing_.push_back(std::move(p));
  for (DcId peer = 0; peer < options_.dcs; ++peer) {
    if (peer == options_.dc) continue;
    Stream& s = streams_[peer];
    if (s.acked >= previous_last) s.last_progress = ctx.now;
    SendRange(peer, outgoing_.size() - 1, ctx, out);
  }
  return out;
}

void XcServer::SendRange(DcId peer, size_t from_pos, const ServerContext& ctx,
                         std::vector<Outbound>& out) {
  const NodeId leader = ctx.leader_of ? ctx.leader_of(peer, options_.partition) : kNoNode;
  if (leader == kNoNode) return;
  Stream& s = streams_[peer];
  for (size_t i = from_pos; i < outgoing_.size(); ++i) {
    Replicate r;
    r.payload = outgoing_[i];
    r.prev_origin_idx = i == 0 ? 0 : outgoing_[i - 1].origin_idx;
    r.partition = options_.partition;
    r.from = id_;
    s.sent_upto = std::max(s.sent_upto, outgoing_[i].origin_idx);
    out.push_back({leader, std::move(r)});
  }
}

ServerOutput XcServer::HandleAck(const ReplicateAck& ack, const ServerContext& ctx) {
  ServerOutput result;
  if (ack.receiver_dc < 0 || ack.receiver_dc >= options_.dcs) return result;
  Stream& s = streams_[ack.receiver_dc];
  if (ack.acked > s.acked) {
    s.acked = ack.acked;
    s.last_progress = ctx.now;
  }
  return result;
}

ServerOutput XcServer::Tick(const ServerContext& ctx) {
  ServerOutput result;
  raft::Output out = raft_.Tick(ctx.now);
  for (auto& env : out.messages) result.messages.push_back({env.to, std::move(env.msg)});

  const LogIndex last = last_outgoing();
  for (DcId peer = 0; peer < options_.dcs; ++peer) {
    if (peer == options_.dc) continue;
    Stream& s = streams_[peer];
    if (s.acked >= last || ctx.now - s.last_progress < options_.retransmit_timeout) continue;
    // Go-back-N from the first unacknowledged write.
    auto first = std::upper_bound(
        outgoing_.begin(), outgoing_.end(), s.acked,
        [](LogIndex acked, const ReplicationPayload& p) { return acked < p.origin_idx; });
    s.last_progress = ctx.now;
    SendRange(peer, static_cast<size_t>(first - outgoing_.begin()), ctx, result.messages);
  }
  return result;
}

bool XcServer::Drained() const {
  const LogIndex last = last_outgoing();
  for (DcId peer = 0; peer < options_.dcs; ++peer) {
    if (peer != options_.dc && streams_[peer].acked < last) return false;
  }
  return true;
}

void XcServer::Crash() {
  outgoing_.clear();
  for (auto& s : streams_) s = Stream{};
}

void XcServer::Restart(SimTime now) { raft_.Restart(now); }

}  // namespace sgkv
