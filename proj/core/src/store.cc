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

#include "sgkv/store.h"

#include <algorithm>

namespace sgkv {

Store::Store(DcId local_dc, int dcs, size_t gc_window)
    : local_dc_(local_dc), gc_window_(gc_window), sv_(static_cast<size_t>(dcs), 0) {}

void Store::Clear() {
  std::fill(sv_.begin(), sv_.end(), 0);
  last_local_index_ = 0;
  chains_.clear();
}

ApplyResult Store::ApplyCommit(const raft::LogEntry& entry, LogIndex local_index) {
  if (local_index <= last_local_index_) {
    throw InvariantViolation("commit delivered out of local index order");
  }
  last_local_index_ = local_index;
  if (!entry.payload) return ApplyResult::kNoOp;

  const ReplicationPayload& p = *entry.payload;
  const DcId origin = p.origin_dc;
  if (origin < 0 || static_cast<size_t>(origin) >= sv_.size()) {
    throw InvariantViolation("origin datacenter out of range");
  }
  LogIndex oidx = p.origin_idx;
  if (origin == local_dc_) {
    if (oidx == kUnassigned) oidx = local_index;
    if (oidx != local_index) {
      throw InvariantViolation("local-origin entry committed under a foreign index");
    }
  } else if (oidx == kUnassigned) {
    throw InvariantViolation("replicated entry without an origin index");
  }

  if (oidx <= sv_[origin]) return ApplyResult::kDeduplicated;

  StoredVersion sv;
  sv.version = p.version;
  sv.origin_idx = oidx;
  sv.writer = p.writer;
  sv.writer_req = p.writer_req;
  auto& chain = chains_[p.key];
  chain.push_back(std::move(sv));
  sv_[origin] = oidx;
  if (chain.size() > gc_window_ + 1) GcChain(p.key);
  return ApplyResult::kApplied;
}

const StoredVersion* Store::ReadLatest(const std::string& key) const {
  auto it = chains_.find(key);
  if (it == chains_.end() || it->second.empty()) return nullptr;
  return &*std::max_element(it->second.begin(), it->second.end(), VersionLess);
}

size_t Store::GcChain(const std::string& key) {
  auto it = chains_.find(key);
  if (it == chains_.end()) return 0;
  auto& chain = it->second;
  const size_t keep = std::min(chain.size(), gc_window_ + 1);
  std::partial_sort(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(keep), chain.end(),
                    [](const StoredVersion& a, const StoredVersion& b) { return VersionLess(b, a); });
  chain.resize(keep);
  return keep;
}

const std::vector<StoredVersion>* Store::Chain(const std::string& key) const {
  auto it = chains_.find(key);
  return it == chains_.end() ? nullptr : &it->second;
}

}  // namespace sgkv
