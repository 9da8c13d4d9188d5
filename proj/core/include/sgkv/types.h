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
#include <string_view>
#include <tuple>
#include <vector>

#include "sgkv/hlc.h"

namespace sgkv {

using NodeId = int32_t;
using ClientId = int32_t;
using DcId = int32_t;
using PartitionId = int32_t;
using LogIndex = uint64_t;
using Term = uint64_t;
using RequestId = uint64_t;

/// Simulated time in microseconds.
using SimTime = int64_t;

inline constexpr NodeId kNoNode = -1;
inline constexpr ClientId kNoClient = -1;
inline constexpr LogIndex kUnassigned = 0;

inline constexpr SimTime Millis(double ms) { return static_cast<SimTime>(ms * 1000.0); }
inline constexpr double ToMillis(SimTime t) { return static_cast<double>(t) / 1000.0; }

/// Per-datacenter vector of origin log indices (stable vector, hrv, hwv).
using IndexVector = std::vector<LogIndex>;

/// System-wide identity of a write: origin datacenter plus the index the
/// write received in its origin datacenter's log.
struct VersionId {
  DcId dc = -1;
  LogIndex idx = 0;

  bool valid() const { return dc >= 0 && idx > 0; }
  friend auto operator<=>(const VersionId&, const VersionId&) = default;
};

struct VersionIdHash {
  size_t operator()(const VersionId& v) const noexcept {
    return std::hash<uint64_t>{}((static_cast<uint64_t>(v.dc) << 48) ^ v.idx);
  }
};

struct Version {
  std::string value;
  HlcTimestamp t;
  DcId dc_id = 0;
};

/// A committed version as held in a chain: the version plus the origin index
/// it was committed under and the writer it came from (trace metadata only;
/// the protocol never looks at the writer).
struct StoredVersion {
  Version version;
  LogIndex origin_idx = 0;
  ClientId writer = kNoClient;
  RequestId writer_req = 0;

  VersionId id() const { return {version.dc_id, origin_idx}; }
};

/// Winner order: timestamp, then origin datacenter, then origin index. The
/// last key only matters when two leaders of one datacenter stamped the same
/// HLC value across a leadership change.
inline bool VersionLess(const StoredVersion& a, const StoredVersion& b) {
  return std::tie(a.version.t, a.version.dc_id, a.origin_idx) <
         std::tie(b.version.t, b.version.dc_id, b.origin_idx);
}

struct ReplicationPayload {
  std::string key;
  Version version;
  DcId origin_dc = 0;
  // kUnassigned while a locally originated write is uncommitted.
  LogIndex origin_idx = kUnassigned;
  ClientId writer = kNoClient;
  RequestId writer_req = 0;
};

enum class ReadLevel : uint8_t {
  kEventual,
  kMonotonicRead,
  kReadYourWrite,
  kMonotonicReadYourWrite,
};

enum class WriteLevel : uint8_t {
  kEventual,
  kMonotonicWrite,
  kWriteFollowsReads,
  kMonotonicWriteFollowsReads,
};

inline bool RequiresMonotonicRead(ReadLevel l) {
  return l == ReadLevel::kMonotonicRead || l == ReadLevel::kMonotonicReadYourWrite;
}
inline bool RequiresReadYourWrite(ReadLevel l) {
  return l == ReadLevel::kReadYourWrite || l == ReadLevel::kMonotonicReadYourWrite;
}
inline bool RequiresMonotonicWrite(WriteLevel l) {
  return l == WriteLevel::kMonotonicWrite || l == WriteLevel::kMonotonicWriteFollowsReads;
}
inline bool RequiresWriteFollowsReads(WriteLevel l) {
  return l == WriteLevel::kWriteFollowsReads || l == WriteLevel::kMonotonicWriteFollowsReads;
}

std::string_view ToString(ReadLevel l);
std::string_view ToString(WriteLevel l);
std::optional<ReadLevel> ParseReadLevel(std::string_view s);
std::optional<WriteLevel> ParseWriteLevel(std::string_view s);

/// A protocol invariant was breached inside a node. Always a bug or a
/// deliberately broken scenario (e.g. FIFO disabled).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// 64-bit FNV-1a, used for trace hashes and the key partition function.
uint64_t Fnv1a(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);

inline PartitionId PartitionOfKey(std::string_view key, int partitions) {
  return static_cast<PartitionId>(Fnv1a(key) % static_cast<uint64_t>(partitions));
}

}  // namespace sgkv
