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
#include <unordered_map>
#include <vector>

#include "sgkv/replicated_log.h"
#include "sgkv/types.h"

namespace sgkv {

enum class ApplyResult { kApplied, kDeduplicated, kNoOp };

/// Versioned key-value state of one data replica: version chains plus the
/// stable vector. Only committed entries ever reach it.
class Store {
 public:
  Store(DcId local_dc, int dcs, size_t gc_window = 4);

  DcId local_dc() const { return local_dc_; }
  const IndexVector& sv() const { return sv_; }
  LogIndex sv(DcId d) const { return sv_.at(d); }
  size_t gc_window() const { return gc_window_; }

  // Entries must arrive in local index order. A remote-origin entry whose
  // origin index is already covered by sv is a duplicate from a replayed
  // stream and is dropped.
  ApplyResult ApplyCommit(const raft::LogEntry& entry, LogIndex local_index);

  // Version with the greatest (t, dc_id, origin_idx); nullptr when absent.
  const StoredVersion* ReadLatest(const std::string& key) const;

  // Keeps the winner and the next `gc_window` versions in winner order.
  size_t GcChain(const std::string& key);

  const std::vector<StoredVersion>* Chain(const std::string& key) const;
  const std::unordered_map<std::string, std::vector<StoredVersion>>& chains() const {
    return chains_;
  }

  void Clear();

 private:
  DcId local_dc_;
  size_t gc_window_;
  IndexVector sv_;
  LogIndex last_local_index_ = 0;
  std::unordered_map<std::string, std::vector<StoredVersion>> chains_;
};

}  // namespace sgkv
