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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgkv/types.h"

namespace sgkv {

inline constexpr std::string_view kTraceSchema = "sgkv-trace/1";

enum class EventKind : uint8_t {
  kGetIssued,
  kGetServed,
  kGetReplied,
  kPutIssued,
  kPutCommittedAtServer,
  kPutReplied,
  kCommitApplied,
  kSvSnapshot,
  kParked,
  kOpTimeout,
  kBecameLeader,
  kXdcDeliver,
  kCrash,
  kRestart,
  kFinalSnapshot,
};

std::string_view ToString(EventKind k);
std::optional<EventKind> ParseEventKind(std::string_view s);

enum class OpKind : uint8_t { kGet, kPut };

/// One trace record. Every kind uses the same flat layout; fields that do not
/// apply keep their defaults. Which fields each kind fills:
///
///   GetIssued            client req key node(target) read_level hrv hwv
///   GetServed            client req key node read_level version found t log_idx sv
///   GetReplied           client req key node version found t log_idx dc
///   PutIssued            client req key node(target) write_level t(=dt) hrv hwv
///   PutCommittedAtServer client req key node version t
///   PutReplied           client req key node version t log_idx
///   CommitApplied        node group log_idx term version (invalid for no-ops)
///                        detail ("dedup" when the version was already applied)
///   SvSnapshot           node sv
///   Parked               client req key node op
///   OpTimeout            client req key node op
///   BecameLeader         node group term
///   XdcDeliver           node(receiver) peer(sender) log_idx(channel seq) key version
///   Crash / Restart      node
///   FinalSnapshot        node key version found t detail(value digest); one
///                        record per key per live replica after quiescence
struct TraceEvent {
  EventKind kind = EventKind::kGetIssued;
  uint64_t seq = 0;
  SimTime time = 0;
  NodeId node = kNoNode;
  NodeId peer = kNoNode;
  ClientId client = kNoClient;
  RequestId req = 0;
  int group = -1;
  std::string key;
  VersionId version;
  bool found = false;
  HlcTimestamp t;
  LogIndex log_idx = 0;
  Term term = 0;
  DcId dc = -1;
  OpKind op = OpKind::kGet;
  ReadLevel read_level = ReadLevel::kEventual;
  WriteLevel write_level = WriteLevel::kEventual;
  IndexVector sv;
  IndexVector hrv;
  IndexVector hwv;
  std::string detail;
};

/// Receives events as a run produces them. Assigns sequence numbers.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void Record(TraceEvent event) = 0;
};

class NullTraceSink final : public TraceSink {
 public:
  void Record(TraceEvent) override {}
};

class VectorTraceSink final : public TraceSink {
 public:
  void Record(TraceEvent event) override {
    event.seq = events_.size();
    events_.push_back(std::move(event));
  }
  const std::vector<TraceEvent>& events() const { return events_; }
  std::vector<TraceEvent> Take() { return std::move(events_); }

 private:
  std::vector<TraceEvent> events_;
};

struct TraceHeader {
  std::string schema{kTraceSchema};
  uint64_t seed = 0;
  uint64_t config_hash = 0;
  int dcs = 0;
  int partitions = 0;
  std::string config_json;  // the full resolved config, serialized
};

// Newline-delimited JSON: one header record, then one record per event, with
// a fixed field order so identical runs produce identical bytes.
std::string SerializeHeader(const TraceHeader& header);
std::string SerializeEvent(const TraceEvent& event);
void WriteTrace(std::ostream& os, const TraceHeader& header, const std::vector<TraceEvent>& events);

struct ParsedTrace {
  TraceHeader header;
  std::vector<TraceEvent> events;
};

// Throws std::runtime_error with the offending line number on malformed input.
ParsedTrace ReadTrace(std::istream& is);

/// FNV-1a over the serialized records, header included.
uint64_t TraceHash(const TraceHeader& header, const std::vector<TraceEvent>& events);

}  // namespace sgkv
