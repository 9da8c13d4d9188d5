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

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "sgkv/replicated_log.h"
#include "sgkv/types.h"

namespace sgkv {

enum class ReplyStatus : uint8_t { kOk, kNotFound, kNotLeader, kWrongPartition, kTimeout };

std::string_view ToString(ReplyStatus s);

struct GetRequest {
  ClientId client = kNoClient;
  NodeId reply_to = kNoNode;
  RequestId req = 0;
  std::string key;
  IndexVector hrv;
  IndexVector hwv;
  ReadLevel level = ReadLevel::kEventual;
};

struct GetReply {
  ClientId client = kNoClient;
  RequestId req = 0;
  NodeId server = kNoNode;
  ReplyStatus status = ReplyStatus::kOk;
  std::string value;
  DcId dc_id = 0;
  LogIndex log_idx = 0;
  HlcTimestamp t;
  VersionId version;  // identity of the returned version, for tracing
};

struct BlockingVectors {
  IndexVector hrv;
  IndexVector hwv;
};

struct PutRequest {
  ClientId client = kNoClient;
  NodeId reply_to = kNoNode;
  RequestId req = 0;
  std::string key;
  std::string value;
  HlcTimestamp dt;
  // Present only when the store runs without HLC stamping.
  std::optional<BlockingVectors> blocking;
  WriteLevel level = WriteLevel::kEventual;
};

struct PutReply {
  ClientId client = kNoClient;
  RequestId req = 0;
  NodeId server = kNoNode;
  ReplyStatus status = ReplyStatus::kOk;
  DcId dc_id = 0;
  LogIndex log_idx = 0;
  HlcTimestamp t;
  std::optional<NodeId> leader_hint;
};

/// Cross-datacenter propagation of one locally committed write. The
/// predecessor index lets the receiving group append the stream gap-free
/// across its own leader changes.
struct Replicate {
  ReplicationPayload payload;
  LogIndex prev_origin_idx = 0;
  PartitionId partition = 0;
  NodeId from = kNoNode;  // the sending XC
  bool forwarded = false;
};

struct ReplicateAck {
  DcId origin_dc = 0;
  DcId receiver_dc = 0;
  PartitionId partition = 0;
  LogIndex acked = 0;  // receiver's committed sv[origin_dc]
  NodeId from = kNoNode;
};

using Message =
    std::variant<raft::Message, GetRequest, GetReply, PutRequest, PutReply, Replicate, ReplicateAck>;

std::string_view Tag(const Message& m);

struct Outbound {
  NodeId to = kNoNode;
  Message msg;
};

}  // namespace sgkv
