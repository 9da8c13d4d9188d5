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

// Brute-force reference for small traces. Every query rescans the trace from
// the start, so the cost is quadratic or worse; it exists to cross-check the
// incremental checker, not to replace it.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sgkv/checker.h"
#include "sgkv/trace.h"

namespace sgkv {

/// The three set families materialized from events with seq < `before`.
struct OracleSets {
  std::map<std::pair<NodeId, std::string>, std::set<VersionId>> committed_writes;
  std::map<std::pair<ClientId, std::string>, std::set<VersionId>> client_writes;
  std::map<std::pair<ClientId, std::string>, std::set<VersionId>> client_reads;
};

OracleSets OracleReplay(const std::vector<TraceEvent>& events, uint64_t before);

std::set<VersionId> CommittedWritesAt(const std::vector<TraceEvent>& events, NodeId server,
                                      const std::string& key, uint64_t before);
std::set<VersionId> ClientWritesAt(const std::vector<TraceEvent>& events, ClientId client,
                                   const std::string& key, uint64_t before);
std::set<VersionId> ClientReadsAt(const std::vector<TraceEvent>& events, ClientId client,
                                  const std::string& key, uint64_t before);

/// MR, RYW, MW, WFR, R2 and the stable-vector lemma, straight from the
/// definitions. Sorted like CheckReport::violations.
std::vector<Violation> OracleCheck(const std::vector<TraceEvent>& events, int dcs, int partitions,
                                   const CheckOptions& options = {});

}  // namespace sgkv
