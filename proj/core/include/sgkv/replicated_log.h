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

// Minimal Raft: leader election, log replication and commitment for one
// (datacenter, partition) group. Nodes are pure state machines driven by the
// caller; they own no timers and never block.

#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "sgkv/types.h"

namespace sgkv::raft {

enum class Role : uint8_t { kFollower, kCandidate, kLeader };

std::string_view ToString(Role r);

struct LogEntry {
  LogIndex index = 0;
  Term term = 0;
  // nullopt marks the no-op a new leader appends to commit earlier terms.
  std::optional<ReplicationPayload> payload;
};

struct AppendEntries {
  Term term = 0;
  NodeId leader = kNoNode;
  LogIndex prev_index = 0;
  Term prev_term = 0;
  std::vector<LogEntry> entries;
  LogIndex leader_commit = 0;
};

struct AppendEntriesReply {
  Term term = 0;
  NodeId from = kNoNode;
  bool success = false;
  LogIndex match_index = 0;  // valid when success
  LogIndex next_hint = 0;    // valid when !success
};

struct RequestVote {
  Term term = 0;
  NodeId candidate = kNoNode;
  LogIndex last_index = 0;
  Term last_term = 0;
};

struct RequestVoteReply {
  Term term = 0;
  NodeId from = kNoNode;
  bool granted = false;
};

using Message = std::variant<AppendEntries, AppendEntriesReply, RequestVote, RequestVoteReply>;

/// Short type tag used in traces: AE / AER / RV / RVR.
std::string_view Tag(const Message& m);

struct Envelope {
  NodeId to = kNoNode;
  Message msg;
};

struct Output {
  std::vector<Envelope> messages;
  // Newly committed entries, each reported once per incarnation, in index order.
  std::vector<LogEntry> committed;
  bool became_leader = false;

  void Append(Output&& other);
};

struct Config {
  SimTime tick = Millis(1);
  int election_min_ticks = 10;
  int election_max_ticks = 20;
  int heartbeat_ticks = 1;
  size_t max_batch = 64;
};

struct Accepted {
  LogIndex index = 0;
  Term term = 0;
};

struct NotLeader {
  std::optional<NodeId> hint;
};

using ProposeResult = std::variant<Accepted, NotLeader>;

class Node {
 public:
  // `voters` includes `self` unless the node is a learner. Learners receive
  // the log but never vote, never campaign and never count toward a quorum.
  Node(NodeId self, std::vector<NodeId> voters, std::vector<NodeId> learners, Config config,
       uint64_t seed, SimTime now = 0);

  NodeId id() const { return self_; }
  bool is_learner() const { return learner_; }
  Role role() const { return role_; }
  Term term() const { return term_; }
  std::optional<NodeId> voted_for() const { return voted_for_; }
  std::optional<NodeId> leader_hint() const { return leader_; }
  LogIndex commit_index() const { return commit_index_; }
  LogIndex last_index() const { return log_.size(); }
  Term last_term() const { return log_.empty() ? 0 : log_.back().term; }
  const std::vector<LogEntry>& log() const { return log_; }
  const LogEntry& entry(LogIndex index) const { return log_.at(index - 1); }
  SimTime election_deadline() const { return election_deadline_; }

  ProposeResult Propose(ReplicationPayload payload, SimTime now, Output& out);
  Output Handle(const Message& msg, SimTime now);
  Output Tick(SimTime now);

  // Loses all volatile state. Term, vote and log survive.
  void Restart(SimTime now);

 private:
  size_t quorum() const { return voters_.size() / 2 + 1; }
  Term TermAt(LogIndex index) const { return index == 0 ? 0 : log_[index - 1].term; }
  std::vector<NodeId> Peers() const;

  void BecomeFollower(Term term, std::optional<NodeId> leader, SimTime now);
  void BecomeLeader(SimTime now, Output& out);
  void StartElection(SimTime now, Output& out);
  void ResetElectionTimer(SimTime now);

  void SendAppend(NodeId peer, Output& out);
  void BroadcastAppend(Output& out);
  void MaybeAdvanceCommit(Output& out);
  void SetCommit(LogIndex index, Output& out);

  void OnAppendEntries(const AppendEntries& m, SimTime now, Output& out);
  void OnAppendEntriesReply(const AppendEntriesReply& m, SimTime now, Output& out);
  void OnRequestVote(const RequestVote& m, SimTime now, Output& out);
  void OnRequestVoteReply(const RequestVoteReply& m, SimTime now, Output& out);

  NodeId self_;
  std::vector<NodeId> voters_;
  std::vector<NodeId> learners_;
  bool learner_;
  Config config_;
  std::mt19937_64 rng_;

  // Persistent.
  Term term_ = 0;
  std::optional<NodeId> voted_for_;
  std::vector<LogEntry> log_;

  // Volatile.
  Role role_ = Role::kFollower;
  std::optional<NodeId> leader_;
  LogIndex commit_index_ = 0;
  LogIndex last_reported_ = 0;
  SimTime election_deadline_ = 0;
  SimTime heartbeat_due_ = 0;
  std::vector<NodeId> votes_;
  std::vector<std::pair<NodeId, LogIndex>> next_index_;
  std::vector<std::pair<NodeId, LogIndex>> match_index_;

  LogIndex& NextFor(NodeId peer);
  LogIndex& MatchFor(NodeId peer);
};

}  // namespace sgkv::raft
