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

// Post-hoc validation of a run trace: the four per-key session guarantees,
// convergence (R1), committed-only reads (R2), the stable-vector lemma, Raft
// safety and cross-datacenter FIFO delivery.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sgkv/trace.h"

namespace sgkv {

inline constexpr std::string_view kViolationSchema = "sgkv-violations/1";

// Definition identifiers used in reports.
namespace defs {
inline constexpr std::string_view kMonotonicRead = "MR";
inline constexpr std::string_view kReadYourWrite = "RYW";
inline constexpr std::string_view kMonotonicWrite = "MW";
inline constexpr std::string_view kWriteFollowsReads = "WFR";
inline constexpr std::string_view kConvergence = "R1";
inline constexpr std::string_view kCommittedReads = "R2";
inline constexpr std::string_view kStableVector = "LEMMA1";
inline constexpr std::string_view kElectionSafety = "ELECTION_SAFETY";
inline constexpr std::string_view kCommitSafety = "COMMIT_SAFETY";
inline constexpr std::string_view kFifo = "FIFO";
}  // namespace defs

struct Violation {
  std::string def;
  uint64_t seq = 0;  // event at which the violation is observed
  SimTime time = 0;
  ClientId client = kNoClient;
  NodeId server = kNoNode;
  std::string key;
  VersionId offending;
  // MR/RYW: issue event of the read. MW/WFR: issue event of the write O
  // that forbids the returned version (latest such O).
  uint64_t witness_seq = 0;
  std::string detail;

  friend bool operator==(const Violation& a, const Violation& b) {
    return a.def == b.def && a.seq == b.seq && a.offending == b.offending &&
           a.witness_seq == b.witness_seq && a.server == b.server && a.key == b.key;
  }
  friend bool operator<(const Violation& a, const Violation& b);
};

struct CheckOptions {
  // false: a guarantee is checked only for operations that requested it.
  // true: every operation is checked against every guarantee.
  bool all_ops = false;
};

struct CheckReport {
  std::vector<Violation> violations;
  std::map<std::string, size_t> counts;  // by definition
  size_t parked_gets = 0;
  size_t parked_puts = 0;
  size_t events = 0;

  size_t count(std::string_view def) const {
    auto it = counts.find(std::string(def));
    return it == counts.end() ? 0 : it->second;
  }
  bool clean() const { return violations.empty(); }
};

CheckReport CheckTrace(const std::vector<TraceEvent>& events, int dcs, int partitions,
                       const CheckOptions& options = {});

// Single-definition views over CheckTrace.
std::vector<Violation> CheckMonotonicRead(const std::vector<TraceEvent>& events, int dcs,
                                          int partitions, const CheckOptions& options = {});
std::vector<Violation> CheckReadYourWrite(const std::vector<TraceEvent>& events, int dcs,
                                          int partitions, const CheckOptions& options = {});
std::vector<Violation> CheckMonotonicWrite(const std::vector<TraceEvent>& events, int dcs,
                                           int partitions, const CheckOptions& options = {});
std::vector<Violation> CheckWriteFollowsReads(const std::vector<TraceEvent>& events, int dcs,
                                              int partitions, const CheckOptions& options = {});
std::vector<Violation> CheckConvergenceAndCommittedReads(const std::vector<TraceEvent>& events,
                                                         int dcs, int partitions);
std::vector<Violation> CheckStableVectorLemma(const std::vector<TraceEvent>& events, int dcs,
                                              int partitions);

std::vector<Violation> OnlyDef(const std::vector<Violation>& all, std::string_view def);

// Structured text: a schema line, a summary line, then one line per violation.
std::string FormatReport(const CheckReport& report);

}  // namespace sgkv
