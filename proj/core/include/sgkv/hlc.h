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

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace sgkv {

/// Hybrid logical clock value <l, c>. `l` carries milliseconds of physical
/// time (48 bits), `c` a bounded counter (16 bits). The packed 64-bit form
/// orders exactly like the (l, c) pair, so comparisons are one integer compare.
class HlcTimestamp {
 public:
  static constexpr int kCounterBits = 16;
  static constexpr uint64_t kMaxCounter = (uint64_t{1} << kCounterBits) - 1;
  static constexpr uint64_t kMaxPhysical = (uint64_t{1} << (64 - kCounterBits)) - 1;

  constexpr HlcTimestamp() = default;
  constexpr HlcTimestamp(uint64_t l, uint64_t c) : packed_((l << kCounterBits) | c) {}

  static constexpr HlcTimestamp FromPacked(uint64_t packed) {
    HlcTimestamp t;
    t.packed_ = packed;
    return t;
  }

  constexpr uint64_t l() const { return packed_ >> kCounterBits; }
  constexpr uint64_t c() const { return packed_ & kMaxCounter; }
  constexpr uint64_t packed() const { return packed_; }
  constexpr bool is_zero() const { return packed_ == 0; }

  friend constexpr auto operator<=>(HlcTimestamp, HlcTimestamp) = default;

 private:
  uint64_t packed_ = 0;
};

std::ostream& operator<<(std::ostream& os, HlcTimestamp t);

/// Raised when the counter would leave its 16-bit range. Wrapping would break
/// the total order, so this is fatal for the scenario that triggers it.
class HlcOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-node clock state. All updates go through `Merge`; a local event is a
/// merge with the zero timestamp.
class HlcClock {
 public:
  HlcClock() = default;
  explicit HlcClock(HlcTimestamp start) : current_(start) {}

  HlcTimestamp current() const { return current_; }

  HlcTimestamp AdvanceLocal(uint64_t physical_ms) { return Merge(HlcTimestamp{}, physical_ms); }

  // Result is strictly greater than both the previous state and `remote`.
  HlcTimestamp Merge(HlcTimestamp remote, uint64_t physical_ms);

 private:
  HlcTimestamp current_;
};

}  // namespace sgkv
