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

#include "sgkv/cluster.h"

#include <algorithm>
#include <cstdio>

namespace sgkv {

struct Cluster::ClientState {
  ClientId id = kNoClient;
  NodeId node = kNoNode;
  DcId home = 0;
  ClientSession session;
  std::vector<ScriptOp> script;
  size_t script_pos = 0;
  bool scripted = false;

  // Current logical operation.
  bool active = false;
  size_t op_index = 0;
  OpKind op = OpKind::kGet;
  std::string key;
  std::string value;
  ReadLevel read_level = ReadLevel::kEventual;
  WriteLevel write_level = WriteLevel::kEventual;
  DcId target_dc = 0;
  std::optional<NodeId> forced_target;
  uint64_t token = 0;
  int redirects = 0;

  ClientState(ClientId c, NodeId n, DcId d, int dcs, int partitions)
      : id(c), node(n), home(d), session(c, dcs, partitions) {}
};

namespace {

std::string KeyName(int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "key-%012d", k);
  return buf;
}

std::string ValueFor(ClientId c, uint64_t op) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "c%05d-op%012llu-", c, static_cast<unsigned long long>(op));
  std::string v(buf);
  v.resize(64, 'x');
  return v;
}

raft::Config RaftConfig(const ScenarioConfig& c) {
  raft::Config rc;
  rc.tick = Millis(c.tick_ms);
  rc.election_min_ticks = c.election_min_ticks;
  rc.election_max_ticks = c.election_max_ticks;
  rc.heartbeat_ticks = 2;
  return rc;
}

bool SamePayload(const std::optional<ReplicationPayload>& a,
                 const std::optional<ReplicationPayload>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->key == b->key && a->version.t == b->version.t && a->version.dc_id == b->version.dc_id &&
         a->version.value == b->version.value && a->origin_dc == b->origin_dc &&
         a->origin_idx == b->origin_idx && a->writer == b->writer &&
         a->writer_req == b->writer_req;
}

bool SameEntry(const raft::LogEntry& a, const raft::LogEntry& b) {
  return a.index == b.index && a.term == b.term && SamePayload(a.payload, b.payload);
}

}  // namespace

Cluster::Cluster(ScenarioConfig config)
    : config_(std::move(config)),
      topology_(config_.dcs, config_.partitions, config_.replicas, config_.clients_per_dc),
      workload_rng_(config_.seed * 0x9e3779b97f4a7c15ULL + 1) {
  Validate(config_);
  std::mt19937_64 clock_rng(config_.seed ^ 0x5bd1e995ULL);
  clocks_ = ClockModel::Random(topology_.node_count(), Millis(config_.skew_ms), config_.drift,
                               clock_rng);
  if (!config_.dc_offsets_ms.empty()) {
    for (NodeId n = 0; n < topology_.server_count(); ++n) {
      ClockModel::NodeClock c = clocks_.clock(n);
      c.offset = Millis(config_.dc_offsets_ms.at(topology_.DcOf(n)));
      clocks_.Set(n, c);
    }
  }

  ChannelModel channel;
  channel.intra_min = Millis(config_.intra_delay_min_ms);
  channel.intra_max = Millis(config_.intra_delay_max_ms);
  channel.drop_prob = config_.drop_prob;
  channel.dup_prob = config_.dup_prob;
  channel.xdc_delay = Millis(config_.xdc_delay_ms);
  channel.xdc_jitter = Millis(config_.xdc_jitter_ms);
  channel.fifo = config_.fifo;
  network_ = std::make_unique<Network>(
      loop_, topology_, channel, config_.seed ^ 0x2545f4914f6cdd1dULL,
      [this](NodeId from, NodeId to, Message msg) { Deliver(from, to, std::move(msg)); },
      &trace_);

  const int servers = topology_.server_count();
  data_.resize(static_cast<size_t>(servers));
  xc_.resize(static_cast<size_t>(servers));
  alive_.assign(static_cast<size_t>(servers), true);
  incarnation_.assign(static_cast<size_t>(servers), 0);
  cpu_free_at_.assign(static_cast<size_t>(servers), 0);
  leaders_.assign(static_cast<size_t>(topology_.group_count()), kNoNode);

  const raft::Config rc = RaftConfig(config_);
  for (DcId d = 0; d < topology_.dcs(); ++d) {
    for (PartitionId p = 0; p < topology_.partitions(); ++p) {
      const std::vector<NodeId> voters = topology_.Voters(d, p);
      const NodeId xc = topology_.Xc(d, p);
      std::vector<NodeId> xc_of_dc;
      for (DcId e = 0; e < topology_.dcs(); ++e) xc_of_dc.push_back(topology_.Xc(e, p));
      for (NodeId n : voters) {
        DataServer::Options o;
        o.dc = d;
        o.partition = p;
        o.dcs = topology_.dcs();
        o.hlc_mode = config_.hlc_mode;
        o.fifo = config_.fifo;
        o.gc_window = static_cast<size_t>(config_.gc_window);
        o.partitions = topology_.partitions();
        o.park_timeout = Millis(config_.park_timeout_ms);
        o.xc_of_dc = xc_of_dc;
        data_[n] = std::make_unique<DataServer>(
            n, o, raft::Node(n, voters, {xc}, rc, config_.seed * 1000003ULL + n, 0));
      }
      XcServer::Options xo;
      xo.dc = d;
      xo.partition = p;
      xo.dcs = topology_.dcs();
      xo.partitions = topology_.partitions();
      xo.retransmit_timeout = Millis(config_.retransmit_ms);
      xc_[xc] = std::make_unique<XcServer>(
          xc, xo, raft::Node(xc, voters, {xc}, rc, config_.seed * 1000003ULL + xc, 0));
    }
  }

  ctx_.trace = &trace_;
  ctx_.leader_of = [this](DcId d, PartitionId p) { return leaders_.at(topology_.Group(d, p)); };

  std::vector<bool> scripted(static_cast<size_t>(topology_.client_count()), false);
  for (const auto& s : config_.script) scripted.at(s.client) = true;
  for (ClientId c = 0; c < topology_.client_count(); ++c) {
    auto cs = std::make_unique<ClientState>(c, topology_.ClientNode(c), topology_.DcOfClient(c),
                                            topology_.dcs(), topology_.partitions());
    cs->scripted = scripted[c];
    for (const auto& s : config_.script) {
      if (s.client == c) cs->script.push_back(s);
    }
    clients_.push_back(std::move(cs));
  }
}

Cluster::~Cluster() = default;

const DataServer* Cluster::data_server(NodeId n) const {
  return topology_.IsServer(n) ? data_[n].get() : nullptr;
}

const XcServer* Cluster::xc_server(NodeId n) const {
  return topology_.IsServer(n) ? xc_[n].get() : nullptr;
}

ServerContext& Cluster::Ctx(NodeId n) {
  ctx_.now = loop_.now();
  ctx_.physical_ms = clocks_.PhysicalNowMs(n, loop_.now());
  return ctx_;
}

// ---------------------------------------------------------------------------
// Message plumbing

void Cluster::Deliver(NodeId from, NodeId to, Message msg) {
  if (topology_.IsClient(to)) {
    const ClientId c = topology_.ClientOfNode(to);
    if (const auto* g = std::get_if<GetReply>(&msg)) {
      OnGetReply(c, *g);
    } else if (const auto* p = std::get_if<PutReply>(&msg)) {
      OnPutReply(c, *p);
    }
    return;
  }
  if (!topology_.IsServer(to) || !alive_[to]) return;
  (void)from;
  const bool queued =
      std::holds_alternative<GetRequest>(msg) || std::holds_alternative<PutRequest>(msg);
  if (!queued) {
    Process(to, std::move(msg));
    return;
  }
  // Client requests queue on one FIFO CPU per server.
  const SimTime start = std::max(loop_.now(), cpu_free_at_[to]);
  const SimTime done = start + Millis(config_.service_ms);
  cpu_free_at_[to] = done;
  const uint64_t inc = incarnation_[to];
  loop_.Schedule(done, [this, to, inc, m = std::move(msg)]() mutable {
    if (alive_[to] && incarnation_[to] == inc) Process(to, std::move(m));
  });
}

void Cluster::Process(NodeId to, Message msg) {
  ServerContext& ctx = Ctx(to);
  ServerOutput out;
  if (DataServer* s = data_[to].get()) {
    if (auto* r = std::get_if<raft::Message>(&msg)) {
      out = s->HandleRaft(*r, ctx);
    } else if (auto* g = std::get_if<GetRequest>(&msg)) {
      out = s->HandleGet(*g, ctx);
    } else if (auto* p = std::get_if<PutRequest>(&msg)) {
      out = s->HandlePut(*p, ctx);
    } else if (auto* rep = std::get_if<Replicate>(&msg)) {
      out = s->HandleReplicate(*rep, ctx);
    }
  } else if (XcServer* x = xc_[to].get()) {
    if (auto* r = std::get_if<raft::Message>(&msg)) {
      out = x->HandleRaft(*r, ctx);
    } else if (auto* a = std::get_if<ReplicateAck>(&msg)) {
      out = x->HandleAck(*a, ctx);
    }
  }
  Dispatch(to, std::move(out));
}

void Cluster::Dispatch(NodeId from, ServerOutput&& out) {
  if (out.became_leader) leaders_[topology_.GroupOfNode(from)] = from;
  for (auto& m : out.messages) {
    if (m.to == kNoNode || m.to == from) continue;
    network_->Send(from, m.to, std::move(m.msg));
  }
}

void Cluster::TickAll() {
  for (NodeId n = 0; n < topology_.server_count(); ++n) {
    if (!alive_[n]) continue;
    ServerContext& ctx = Ctx(n);
    ServerOutput out = data_[n] ? data_[n]->Tick(ctx) : xc_[n]->Tick(ctx);
    Dispatch(n, std::move(out));
  }
  // Refresh the leader registry: drop dead or deposed leaders, adopt the
  // highest-term live leader of each group.
  for (int g = 0; g < topology_.group_count(); ++g) {
    NodeId& l = leaders_[g];
    if (l != kNoNode && alive_[l] && data_[l]->is_leader()) continue;
    l = kNoNode;
    Term best = 0;
    for (int r = 0; r < topology_.replicas(); ++r) {
      const NodeId n = g * topology_.group_size() + r;
      if (alive_[n] && data_[n]->is_leader() && data_[n]->raft().term() >= best) {
        best = data_[n]->raft().term();
        l = n;
      }
    }
  }
  quiescent_ = CheckQuiescent();
  loop_.ScheduleAfter(Millis(config_.tick_ms), [this] { TickAll(); });
}

bool Cluster::AllGroupsHaveLeaders() const {
  return std::none_of(leaders_.begin(), leaders_.end(), [](NodeId l) { return l == kNoNode; });
}

bool Cluster::CheckQuiescent() const {
  if (!load_started_ || LoadOpen() || faults_outstanding_ > 0) return false;
  for (const auto& c : clients_) {
    if (c->active || c->script_pos < c->script.size()) return false;
  }
  if (network_->app_in_flight() > 0) return false;
  for (int g = 0; g < topology_.group_count(); ++g) {
    const NodeId l = leaders_[g];
    if (l == kNoNode) return false;
    const raft::Node& lr = data_[l]->raft();
    const LogIndex last = lr.last_index();
    if (lr.commit_index() != last) return false;
    for (int r = 0; r < topology_.group_size(); ++r) {
      const NodeId n = g * topology_.group_size() + r;
      if (!alive_[n]) continue;
      if (data_[n]) {
        const raft::Node& nr = data_[n]->raft();
        if (nr.commit_index() != last || nr.last_index() != last) return false;
        if (!data_[n]->pending().empty()) return false;
      } else {
        const raft::Node& xr = xc_[n]->raft();
        if (xr.commit_index() != last || xr.last_index() != last) return false;
        if (!xc_[n]->Drained()) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Faults

NodeId Cluster::ResolveFault(const FaultSpec& f) {
  if (f.target == "node") return f.node;
  if (f.target == "xc") return topology_.Xc(f.dc, f.partition);
  const NodeId leader = leaders_.at(topology_.Group(f.dc, f.partition));
  if (f.target == "leader") return leader != kNoNode ? leader : topology_.Replica(f.dc, f.partition, 0);
  for (int r = 0; r < topology_.replicas(); ++r) {
    const NodeId n = topology_.Replica(f.dc, f.partition, r);
    if (n != leader && alive_[n]) return n;
  }
  return topology_.Replica(f.dc, f.partition, 0);
}

void Cluster::Crash(NodeId n) {
  if (!alive_[n]) return;
  alive_[n] = false;
  ++incarnation_[n];
  if (data_[n]) data_[n]->Crash();
  if (xc_[n]) xc_[n]->Crash();
  NodeId& l = leaders_[topology_.GroupOfNode(n)];
  if (l == n) l = kNoNode;
  TraceEvent e;
  e.kind = EventKind::kCrash;
  e.time = loop_.now();
  e.node = n;
  e.group = topology_.GroupOfNode(n);
  trace_.Record(std::move(e));
}

void Cluster::Restart(NodeId n) {
  if (alive_[n]) return;
  alive_[n] = true;
  ++incarnation_[n];
  cpu_free_at_[n] = loop_.now();
  if (data_[n]) data_[n]->Restart(loop_.now());
  if (xc_[n]) xc_[n]->Restart(loop_.now());
  TraceEvent e;
  e.kind = EventKind::kRestart;
  e.time = loop_.now();
  e.node = n;
  e.group = topology_.GroupOfNode(n);
  trace_.Record(std::move(e));
}

void Cluster::ScheduleFaults() {
  std::vector<FaultSpec> faults = config_.faults;
  if (config_.random_faults > 0) {
    std::mt19937_64 rng(config_.seed ^ 0xfa017ULL);
    const double horizon = config_.duration_ms > 0 ? config_.duration_ms : 300.0;
    for (int i = 0; i < config_.random_faults; ++i) {
      FaultSpec f;
      f.action = "crash";
      f.target = "node";
      f.node = static_cast<NodeId>(UniformInt(rng, 0, topology_.server_count() - 1));
      f.at_ms = 5.0 + Uniform01(rng) * horizon;
      f.restart_after_ms = 20.0 + Uniform01(rng) * 180.0;
      faults.push_back(f);
    }
  }
  for (const FaultSpec& f : faults) {
    ++faults_outstanding_;
    loop_.Schedule(load_start_ + Millis(f.at_ms), [this, f] {
      const NodeId n = ResolveFault(f);
      if (f.action == "restart") {
        Restart(n);
      } else {
        Crash(n);
        if (f.restart_after_ms > 0) {
          ++faults_outstanding_;
          loop_.ScheduleAfter(Millis(f.restart_after_ms), [this, n] {
            Restart(n);
            --faults_outstanding_;
          });
        }
      }
      --faults_outstanding_;
    });
  }
}

// ---------------------------------------------------------------------------
// Clients

bool Cluster::LoadOpen() const {
  if (config_.ops == 0 && config_.duration_ms <= 0) return false;
  if (std::all_of(clients_.begin(), clients_.end(), [](const auto& c) { return c->scripted; })) {
    return false;
  }
  if (config_.ops > 0 && ops_started_ >= config_.ops) return false;
  if (config_.duration_ms > 0 && loop_.now() >= load_start_ + Millis(config_.duration_ms)) {
    return false;
  }
  return true;
}

void Cluster::StartClients() {
  for (auto& c : clients_) {
    const SimTime jitter = UniformInt(workload_rng_, 0, Millis(1));
    const ClientId id = c->id;
    loop_.Schedule(load_start_ + jitter, [this, id] { NextOp(id); });
  }
}

void Cluster::NextOp(ClientId id) {
  ClientState& c = *clients_[id];
  c.active = false;
  c.forced_target.reset();
  c.redirects = 0;
  SimTime delay = 0;
  if (c.scripted) {
    if (c.script_pos >= c.script.size()) return;
    const ScriptOp& s = c.script[c.script_pos++];
    c.op = s.op == "get" ? OpKind::kGet : OpKind::kPut;
    c.key = s.key;
    c.value = s.value;
    c.target_dc = s.dc;
    if (c.op == OpKind::kGet) {
      c.read_level = *ParseReadLevel(s.level);
    } else {
      c.write_level = *ParseWriteLevel(s.level);
    }
    delay = Millis(s.delay_ms);
  } else {
    if (!LoadOpen()) return;
    ++ops_started_;
    c.op = Uniform01(workload_rng_) < config_.write_prob ? OpKind::kPut : OpKind::kGet;
    c.key = KeyName(static_cast<int>(UniformInt(workload_rng_, 0, config_.key_space - 1)));
    c.value = ValueFor(c.id, ops_.size());
    c.read_level = config_.read_level == "RANDOM"
                       ? static_cast<ReadLevel>(UniformInt(workload_rng_, 0, 3))
                       : *ParseReadLevel(config_.read_level);
    c.write_level = config_.write_level == "RANDOM"
                        ? static_cast<WriteLevel>(UniformInt(workload_rng_, 0, 3))
                        : *ParseWriteLevel(config_.write_level);
    c.target_dc = c.home;
    if (topology_.dcs() > 1 && Uniform01(workload_rng_) >= config_.local_prob) {
      const int k = static_cast<int>(UniformInt(workload_rng_, 0, topology_.dcs() - 2));
      c.target_dc = k >= c.home ? k + 1 : k;
    }
  }
  c.active = true;
  c.op_index = ops_.size();
  OpRecord rec;
  rec.client = c.id;
  rec.home_dc = c.home;
  rec.target_dc = c.target_dc;
  rec.op = c.op;
  rec.read_level = c.read_level;
  rec.write_level = c.write_level;
  rec.issued = loop_.now() + delay;
  rec.scripted = c.scripted;
  ops_.push_back(rec);
  if (delay > 0) {
    loop_.ScheduleAfter(delay, [this, id] {
      ops_[clients_[id]->op_index].issued = loop_.now();
      Issue(id);
    });
  } else {
    Issue(id);
  }
}

void Cluster::Issue(ClientId id) {
  ClientState& c = *clients_[id];
  const PartitionId p = topology_.PartitionOf(c.key);
  NodeId target;
  if (c.forced_target) {
    target = *c.forced_target;
  } else {
    target = RouteRequest(topology_, c.op, c.target_dc, p, 1.0, 0.0, Uniform01(workload_rng_),
                          ctx_.leader_of);
  }
  ++ops_[c.op_index].attempts;

  TraceEvent e;
  e.time = loop_.now();
  e.client = c.id;
  e.node = target;
  e.key = c.key;
  e.dc = c.target_dc;
  e.group = topology_.Group(c.target_dc, p);
  if (c.op == OpKind::kGet) {
    GetRequest req = c.session.BuildGet(c.key, c.read_level);
    req.reply_to = c.node;
    e.kind = EventKind::kGetIssued;
    e.req = req.req;
    e.op = OpKind::kGet;
    e.read_level = c.read_level;
    e.hrv = req.hrv;
    e.hwv = req.hwv;
    trace_.Record(std::move(e));
    network_->Send(c.node, target, std::move(req));
  } else {
    PutRequest req = c.session.BuildPut(c.key, c.value, c.write_level, config_.hlc_mode);
    req.reply_to = c.node;
    if (!config_.write_blocking) req.blocking.reset();
    e.kind = EventKind::kPutIssued;
    e.req = req.req;
    e.op = OpKind::kPut;
    e.write_level = c.write_level;
    e.t = req.dt;
    if (req.blocking) {
      e.hrv = req.blocking->hrv;
      e.hwv = req.blocking->hwv;
    }
    trace_.Record(std::move(e));
    network_->Send(c.node, target, std::move(req));
  }
  const uint64_t token = ++c.token;
  loop_.ScheduleAfter(Millis(config_.op_timeout_ms), [this, id, token] { OnTimeout(id, token); });
}

void Cluster::OnTimeout(ClientId id, uint64_t token) {
  ClientState& c = *clients_[id];
  if (!c.active || c.token != token || !c.session.has_outstanding()) return;
  TraceEvent e;
  e.kind = EventKind::kOpTimeout;
  e.time = loop_.now();
  e.client = c.id;
  e.req = *c.session.outstanding_req();
  e.key = c.key;
  e.op = c.op;
  e.detail = "client_timeout";
  trace_.Record(std::move(e));
  c.session.Abandon();
  Retry(id, std::nullopt, 0);
}

void Cluster::Retry(ClientId id, std::optional<NodeId> hint, SimTime delay) {
  ClientState& c = *clients_[id];
  ++c.token;
  c.forced_target = hint;
  loop_.ScheduleAfter(delay, [this, id] { Issue(id); });
}

void Cluster::OnGetReply(ClientId id, const GetReply& r) {
  ClientState& c = *clients_[id];
  if (!c.active || c.op != OpKind::kGet || c.session.outstanding_req() != r.req) return;
  if (r.status == ReplyStatus::kWrongPartition) {
    throw InvariantViolation("GET routed to the wrong partition");
  }
  if (r.status == ReplyStatus::kTimeout || r.status == ReplyStatus::kNotLeader) {
    c.session.Abandon();
    Retry(id, std::nullopt, Millis(1));
    return;
  }
  c.session.AbsorbGetReply(c.key, r);
  TraceEvent e;
  e.kind = EventKind::kGetReplied;
  e.time = loop_.now();
  e.client = c.id;
  e.req = r.req;
  e.key = c.key;
  e.node = r.server;
  e.found = r.status == ReplyStatus::kOk;
  e.version = r.version;
  e.t = r.t;
  e.log_idx = r.log_idx;
  e.dc = r.dc_id;
  e.op = OpKind::kGet;
  e.read_level = c.read_level;
  trace_.Record(std::move(e));
  Complete(id);
}

void Cluster::OnPutReply(ClientId id, const PutReply& r) {
  ClientState& c = *clients_[id];
  if (!c.active || c.op != OpKind::kPut || c.session.outstanding_req() != r.req) return;
  if (r.status == ReplyStatus::kWrongPartition) {
    throw InvariantViolation("PUT routed to the wrong partition");
  }
  if (r.status == ReplyStatus::kNotLeader) {
    c.session.Abandon();
    if (c.redirects == 0 && r.leader_hint && *r.leader_hint != r.server) {
      ++c.redirects;
      Retry(id, r.leader_hint, 0);
    } else {
      c.redirects = 0;
      Retry(id, std::nullopt, Millis(1));
    }
    return;
  }
  if (r.status == ReplyStatus::kTimeout) {
    c.session.Abandon();
    Retry(id, std::nullopt, Millis(1));
    return;
  }
  c.session.AbsorbPutReply(c.key, r);
  TraceEvent e;
  e.kind = EventKind::kPutReplied;
  e.time = loop_.now();
  e.client = c.id;
  e.req = r.req;
  e.key = c.key;
  e.node = r.server;
  e.version = {r.dc_id, r.log_idx};
  e.t = r.t;
  e.log_idx = r.log_idx;
  e.dc = r.dc_id;
  e.op = OpKind::kPut;
  e.write_level = c.write_level;
  trace_.Record(std::move(e));
  Complete(id);
}

void Cluster::Complete(ClientId id) {
  ClientState& c = *clients_[id];
  ++c.token;
  ops_[c.op_index].completed = loop_.now();
  NextOp(id);
}

// ---------------------------------------------------------------------------
// Run

void Cluster::EmitFinalSnapshots() {
  for (NodeId n = 0; n < topology_.server_count(); ++n) {
    if (!alive_[n] || !data_[n]) continue;
    std::vector<std::string> keys;
    for (const auto& [k, chain] : data_[n]->store().chains()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    // Marker record (empty key) so servers holding no keys still take part.
    TraceEvent marker;
    marker.kind = EventKind::kFinalSnapshot;
    marker.time = loop_.now();
    marker.node = n;
    marker.group = topology_.GroupOfNode(n);
    marker.sv = data_[n]->store().sv();
    trace_.Record(std::move(marker));
    for (const auto& k : keys) {
      const StoredVersion* w = data_[n]->store().ReadLatest(k);
      TraceEvent e;
      e.kind = EventKind::kFinalSnapshot;
      e.time = loop_.now();
      e.node = n;
      e.group = topology_.GroupOfNode(n);
      e.key = k;
      e.found = w != nullptr;
      if (w != nullptr) {
        e.version = w->id();
        e.t = w->version.t;
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(Fnv1a(w->version.value)));
        e.detail = buf;
      }
      trace_.Record(std::move(e));
    }
  }
}

void Cluster::CheckLogs(RunResult& result) const {
  for (int g = 0; g < topology_.group_count(); ++g) {
    std::vector<const raft::Node*> members;
    std::vector<bool> live;
    for (int r = 0; r < topology_.group_size(); ++r) {
      const NodeId n = g * topology_.group_size() + r;
      members.push_back(data_[n] ? &data_[n]->raft() : &xc_[n]->raft());
      live.push_back(alive_[n]);
    }
    for (size_t a = 0; a < members.size(); ++a) {
      for (size_t b = a + 1; b < members.size(); ++b) {
        const auto& la = members[a]->log();
        const auto& lb = members[b]->log();
        const size_t common = std::min(la.size(), lb.size());
        // Log Matching: the last index with equal terms pins the prefix.
        size_t pinned = 0;
        for (size_t i = common; i > 0; --i) {
          if (la[i - 1].term == lb[i - 1].term) {
            pinned = i;
            break;
          }
        }
        for (size_t i = 0; i < pinned; ++i) {
          if (!SameEntry(la[i], lb[i])) {
            result.safety_violations.push_back(
                "log matching: group " + std::to_string(g) + " nodes " +
                std::to_string(members[a]->id()) + "/" + std::to_string(members[b]->id()) +
                " differ at index " + std::to_string(i + 1));
            break;
          }
        }
        if (!live[a] || !live[b]) continue;
        const LogIndex committed = std::min(members[a]->commit_index(), members[b]->commit_index());
        for (LogIndex i = 1; i <= committed; ++i) {
          if (!SameEntry(la[i - 1], lb[i - 1])) {
            result.safety_violations.push_back(
                "commit safety: group " + std::to_string(g) + " committed entries differ at " +
                std::to_string(i));
            break;
          }
        }
      }
    }
  }
}

RunResult Cluster::Run() {
  RunResult result;
  result.config = config_;
  result.header.seed = config_.seed;
  result.header.config_hash = ConfigHash(config_);
  result.header.dcs = config_.dcs;
  result.header.partitions = config_.partitions;
  result.header.config_json = ToJson(config_);

  const SimTime limit = Millis(config_.max_sim_ms);
  try {
    loop_.Schedule(Millis(config_.tick_ms), [this] { TickAll(); });
    auto warm = loop_.RunUntil([this] { return AllGroupsHaveLeaders(); }, limit);
    if (!warm.reached) throw std::runtime_error("no leader elected in every group");
    load_start_ = loop_.now();
    load_started_ = true;
    ScheduleFaults();
    StartClients();
    auto run = loop_.RunUntil([this] { return quiescent_; }, limit);
    result.quiesced = run.reached;
    if (!run.reached) result.error = "quiescence not reached before max_sim_ms";
  } catch (const std::exception& ex) {
    result.error = ex.what();
  }

  result.load_start = load_start_;
  result.load_end = load_start_;
  for (const auto& op : ops_) {
    if (!op.scripted) result.load_end = std::max(result.load_end, op.issued);
  }
  result.end_time = loop_.now();
  if (result.error.empty()) EmitFinalSnapshots();
  CheckLogs(result);
  result.events_executed = loop_.executed();
  result.messages_sent = network_->sent();
  result.ops = std::move(ops_);
  result.events = trace_.Take();
  result.trace_hash = TraceHash(result.header, result.events);
  return result;
}

RunResult Simulate(const ScenarioConfig& config) {
  Cluster cluster(config);
  return cluster.Run();
}

}  // namespace sgkv
