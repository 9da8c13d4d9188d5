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

#include "sgkv/client_session.h"

#include <algorithm>

namespace sgkv {

ClientSession::ClientSession(ClientId id, int dcs, int partitions)
    : id_(id),
      dcs_(dcs),
      partitions_(partitions),
      hrm_(static_cast<size_t>(dcs * partitions), 0),
      hwm_(static_cast<size_t>(dcs * partitions), 0) {}

IndexVector ClientSession::HrmColumn(PartitionId p) const {
  IndexVector v(static_cast<size_t>(dcs_));
  for (DcId d = 0; d < dcs_; ++d) v[d] = hrm(d, p);
  return v;
}

IndexVector ClientSession::HwmColumn(PartitionId p) const {
  IndexVector v(static_cast<size_t>(dcs_));
  for (DcId d = 0; d < dcs_; ++d) v[d] = hwm(d, p);
  return v;
}

void ClientSession::Begin(RequestId req, OpKind op, const std::string& key) {
  if (outstanding_) throw ProtocolError("client already has an outstanding request");
  outstanding_ = Outstanding{req, op, key};
}

void ClientSession::Finish(RequestId req, OpKind op, const std::string& key) {
  if (!outstanding_ || outstanding_->req != req || outstanding_->op != op ||
      outstanding_->key != key) {
    throw ProtocolError("reply does not match the outstanding request");
  }
  outstanding_.reset();
}

GetRequest ClientSession::BuildGet(const std::string& key, ReadLevel level) {
  const PartitionId p = PartitionOfKey(key, partitions_);
  GetRequest r;
  r.client = id_;
  r.req = next_req_++;
  r.key = key;
  r.level = level;
  r.hrv = RequiresMonotonicRead(level) ? HrmColumn(p) : IndexVector(dcs_, 0);
  r.hwv = RequiresReadYourWrite(level) ? HwmColumn(p) : IndexVector(dcs_, 0);
  Begin(r.req, OpKind::kGet, key);
  return r;
}

std::string ClientSession::AbsorbGetReply(const std::string& key, const GetReply& reply) {
  Finish(reply.req, OpKind::kGet, key);
  if (reply.status != ReplyStatus::kOk) return {};
  const PartitionId p = PartitionOfKey(key, partitions_);
  LogIndex& cell = hrm_.at(Cell(reply.dc_id, p));
  cell = std::max(cell, reply.log_idx);
  dt_r_ = std::max(dt_r_, reply.t);
  return reply.value;
}

PutRequest ClientSession::BuildPut(const std::string& key, std::string value, WriteLevel level,
                                   bool hlc_mode) {
  const PartitionId p = PartitionOfKey(key, partitions_);
  PutRequest r;
  r.client = id_;
  r.req = next_req_++;
  r.key = key;
  r.value = std::move(value);
  r.level = level;
  const bool mw = RequiresMonotonicWrite(level);
  const bool wfr = RequiresWriteFollowsReads(level);
  if (hlc_mode) {
    HlcTimestamp dt;
    if (mw) dt = std::max(dt, dt_w_);
    if (wfr) dt = std::max(dt, dt_r_);
    r.dt = dt;
  } else {
    BlockingVectors b;
    b.hrv = wfr ? HrmColumn(p) : IndexVector(dcs_, 0);
    b.hwv = mw ? HwmColumn(p) : IndexVector(dcs_, 0);
    r.blocking = std::move(b);
  }
  Begin(r.req, OpKind::kPut, key);
  return r;
}

void ClientSession::AbsorbPutReply(const std::string& key, const PutReply& reply) {
  Finish(reply.req, OpKind::kPut, key);
  if (reply.status != ReplyStatus::kOk) return;
  const PartitionId p = PartitionOfKey(key, partitions_);
  LogIndex& cell = hwm_.at(Cell(reply.dc_id, p));
  cell = std::max(cell, reply.log_idx);
  dt_w_ = std::max(dt_w_, reply.t);
}

NodeId RouteRequest(const Topology& topology, OpKind op, DcId home, PartitionId p,
                    double local_prob, double locality_draw, double replica_draw,
                    const std::function<NodeId(DcId, PartitionId)>& leader_of) {
  DcId dc = home;
  const int others = topology.dcs() - 1;
  if (others > 0 && locality_draw >= local_prob) {
    // Rescale the remainder of the draw onto the remote datacenters.
    const double rest = (locality_draw - local_prob) / (1.0 - local_prob);
    int k = std::min(others - 1, static_cast<int>(rest * others));
    dc = k >= home ? k + 1 : k;
  }
  const int r = std::min(topology.replicas() - 1,
                         static_cast<int>(replica_draw * topology.replicas()));
  if (op == OpKind::kPut && leader_of) {
    const NodeId leader = leader_of(dc, p);
    if (leader != kNoNode) return leader;
  }
  return topology.Replica(dc, p, r);
}

}  // namespace sgkv
