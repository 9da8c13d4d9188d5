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

#include "sgkv/types.h"

#include <array>

namespace sgkv {
namespace {

constexpr std::array<std::string_view, 4> kReadNames = {
    "EVENTUAL", "MONOTONIC_READ", "READ_YOUR_WRITE", "MONOTONIC_READ_YOUR_WRITE"};
constexpr std::array<std::string_view, 4> kWriteNames = {
    "EVENTUAL", "MONOTONIC_WRITE", "WRITE_FOLLOWS_READS", "MONOTONIC_WRITE_FOLLOWS_READS"};

}  // namespace

std::string_view ToString(ReadLevel l) { return kReadNames[static_cast<size_t>(l)]; }
std::string_view ToString(WriteLevel l) { return kWriteNames[static_cast<size_t>(l)]; }

std::optional<ReadLevel> ParseReadLevel(std::string_view s) {
  for (size_t i = 0; i < kReadNames.size(); ++i) {
    if (kReadNames[i] == s) return static_cast<ReadLevel>(i);
  }
  if (s == "E") return ReadLevel::kEventual;
  if (s == "M") return ReadLevel::kMonotonicReadYourWrite;
  return std::nullopt;
}

std::optional<WriteLevel> ParseWriteLevel(std::string_view s) {
  for (size_t i = 0; i < kWriteNames.size(); ++i) {
    if (kWriteNames[i] == s) return static_cast<WriteLevel>(i);
  }
  if (s == "E") return WriteLevel::kEventual;
  if (s == "M") return WriteLevel::kMonotonicWriteFollowsReads;
  return std::nullopt;
}

uint64_t Fnv1a(std::string_view data, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace sgkv
