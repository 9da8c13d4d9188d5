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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "sgkv/messages.h"
#include "sgkv/simnet.h"
#include "sgkv/trace.h"
#include "sgkv/types.h"

namespace sgkv {

/// A reply that does not match the client's outstanding request.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Client-local session state: the highest origin indices read (hrm) and
/// written (hwm) per datacenter and partition, and the highest HLC values read
/// (dt_r) and written (dt_w). Only per-request projections leave the client.
/// One request is outstanding at a time.
class ClientSession {
 public:
  ClientSession(ClientId id, int dcs, int partitions);

  ClientId id() const { return id_; }
  int dcs() const { return dcs_; }
  int partitions() const { return partitions_; }

  LogIndex hrm(DcId d, PartitionId p) const { return hrm_.at(Cell(d, p)); }
  LogIndex hwm(DcId d, PartitionId p) const { return hwm_.at(Cell(d, p)); }
  IndexVector HrmColumn(PartitionId p) const;
  IndexVector HwmColumn(PartitionId p) const;
  HlcTimestamp dt_r() const { return dt_r_; }
  HlcTimestamp dt_w() const { return dt_w_; }

  bool has_outstanding() const { return outstanding_.has_value(); }
  std::optional<RequestId> outstanding_req() const {
    return outstanding_ ? std::optional<RequestId>(outstanding_->req) : std::nullopt;
  }

  GetRequest BuildGet(const std::string& key, ReadLevel level);
  // Returns the value read; empty when the key had no version.
  std::string AbsorbGetReply(const std::string& key, const GetReply& reply);

  PutRequest BuildPut(const std::string& key, std::string value, WriteLevel level,
                      bool hlc_mode);
  void AbsorbPutReply(const std::string& key, const PutReply& reply);

  // Gives up on the outstanding request (timeout or redirect) without
  // touching session state.
  void Abandon() { outstanding_.reset(); }

  // Test hooks for seeding state directly.
  void SetHrm(DcId d, PartitionId p, LogIndex v) { hrm_.at(Cell(d, p)) = v; }
  void SetHwm(DcId d, PartitionId p, LogIndex v) { hwm_.at(Cell(d, p)) = v; }
  void SetDtR(HlcTimestamp t) { dt_r_ = t; }
  void SetDtW(HlcTimestamp t) { dt_w_ = t; }

 private:
  struct Outstanding {
    RequestId req;
    OpKind op;
    std::string key;
  };

  size_t Cell(DcId d, PartitionId p) const {
    if (d < 0 || d >= dcs_ || p < 0 || p >= partitions_) throw std::out_of_range("session cell");
    return static_cast<size_t>(d) * static_cast<size_t>(partitions_) + static_cast<size_t>(p);
  }
  void Begin(RequestId req, OpKind op, const std::string& key);
  void Finish(RequestId req, OpKind op, const std::string& key);

  ClientId id_;
  int dcs_;
  int partitions_;
  std::vector<LogIndex> hrm_;
  std::vector<LogIndex> hwm_;
  HlcTimestamp dt_r_;
  HlcTimestamp dt_w_;
  RequestId next_req_ = 1;
  std::optional<Outstanding> outstanding_;
};

/// Picks the datacenter (home with probability local_prob, else uniform among
/// the others) from `locality_draw` in [0,1), then the node: the group leader
/// for writes, a uniform data replica for reads. `replica_draw` in [0,1)
/// picks the replica, and the write fallback when no leader is known.
NodeId RouteRequest(const Topology& topology, OpKind op, DcId home, PartitionId p,
                    double local_prob, double locality_draw, double replica_draw,
                    const std::function<NodeId(DcId, PartitionId)>& leader_of);

}  // namespace sgkv
