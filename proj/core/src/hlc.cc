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

#include "sgkv/hlc.h"

#include <algorithm>
#include <string>

namespace sgkv {

std::ostream& operator<<(std::ostream& os, HlcTimestamp t) {
  return os << '<' << t.l() << ',' << t.c() << '>';
}

HlcTimestamp HlcClock::Merge(HlcTimestamp remote, uint64_t physical_ms) {
  const uint64_t prev_l = current_.l();
  const uint64_t prev_c = current_.c();
  const uint64_t l = std::max({prev_l, physical_ms, remote.l()});

  uint64_t c = 0;
  if (l == prev_l && l == remote.l()) {
    c = std::max(prev_c, remote.c()) + 1;
  } else if (l == prev_l) {
    c = prev_c + 1;
  } else if (l == remote.l()) {
    c = remote.c() + 1;
  }

  if (l > HlcTimestamp::kMaxPhysical) {
    throw HlcOverflow("physical component exceeds 48 bits: " + std::to_string(l));
  }
  if (c > HlcTimestamp::kMaxCounter) {
    throw HlcOverflow("counter overflow at l=" + std::to_string(l) +
                      "; clock skew too large for a 16-bit counter");
  }
  current_ = HlcTimestamp(l, c);
  return current_;
}

}  // namespace sgkv
