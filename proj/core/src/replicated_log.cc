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

#include "sgkv/replicated_log.h"

#include <algorithm>
#include <cassert>

namespace sgkv::raft {

std::string_view ToString(Role r) {
  switch (r) {
    case Role::kFollower:
      return "follower";
    case Role::kCandidate:
      return "candidate";
    case Role::kLeader:
      return "leader";
  }
  return "?";
}

std::string_view Tag(const Message& m) {
  struct {
    std::string_view operator()(const AppendEntries&) const { return "AE"; }
    std::string_view operator()(const AppendEntriesReply&) const { return "AER"; }
    std::string_view operator()(const RequestVote&) const { return "RV"; }
    std::string_view operator()(const RequestVoteReply&) const { return "RVR"; }
  } visitor;
  return std::visit(visitor, m);
}

void Output::Append(Output&& other) {
  for (auto& e : other.messages) messages.push_back(std::move(e));
  for (auto& e : other.committed) committed.push_back(std::move(e));
  became_leader = became_leader || other.became_leader;
}

Node::Node(NodeId self, std::vector<NodeId> voters, std::vector<NodeId> learners, Config config,
           uint64_t seed, SimTime now)
    : self_(self),
      voters_(std::move(voters)),
      learners_(std::move(learners)),
      learner_(std::find(voters_.begin(), voters_.end(), self) == voters_.end()),
      config_(config),
      rng_(seed) {
  ResetElectionTimer(now);
}

std::vector<NodeId> Node::Peers() const {
  std::vector<NodeId> peers;
  for (NodeId v : voters_) {
    if (v != self_) peers.push_back(v);
  }
  for (NodeId l : learners_) {
    if (l != self_) peers.push_back(l);
  }
  return peers;
}

LogIndex& Node::NextFor(NodeId peer) {
  for (auto& [id, idx] : next_index_) {
    if (id == peer) return idx;
  }
  return next_index_.emplace_back(peer, last_index() + 1).second;
}

LogIndex& Node::MatchFor(NodeId peer) {
  for (auto& [id, idx] : match_index_) {
    if (id == peer) return idx;
  }
  return match_index_.emplace_back(peer, 0).second;
}

void Node::ResetElectionTimer(SimTime now) {
  std::uniform_int_distribution<int> ticks(config_.election_min_ticks,
                                           config_.election_max_ticks);
  election_deadline_ = now + config_.tick * ticks(rng_);
}

ProposeResult Node::Propose(ReplicationPayload payload, SimTime now, Output& out) {
  (void)now;
  if (role_ != Role::kLeader) return NotLeader{leader_};
  LogEntry e{last_index() + 1, term_, std::move(payload)};
  log_.push_back(std::move(e));
  const Accepted accepted{last_index(), term_};
  BroadcastAppend(out);
  MaybeAdvanceCommit(out);
  return accepted;
}

Output Node::Handle(const Message& msg, SimTime now) {
  Output out;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, AppendEntries>) {
          OnAppendEntries(m, now, out);
        } else if constexpr (std::is_same_v<M, AppendEntriesReply>) {
          OnAppendEntriesReply(m, now, out);
        } else if constexpr (std::is_same_v<M, RequestVote>) {
          OnRequestVote(m, now, out);
        } else {
          OnRequestVoteReply(m, now, out);
        }
      },
      msg);
  return out;
}

Output Node::Tick(SimTime now) {
  Output out;
  if (role_ == Role::kLeader) {
    if (now >= heartbeat_due_) {
      heartbeat_due_ = now + config_.tick * config_.heartbeat_ticks;
      BroadcastAppend(out);
    }
    return out;
  }
  if (!learner_ && now >= election_deadline_) StartElection(now, out);
  return out;
}

void Node::Restart(SimTime now) {
  role_ = Role::kFollower;
  leader_.reset();
  commit_index_ = 0;
  last_reported_ = 0;
  votes_.clear();
  next_index_.clear();
  match_index_.clear();
  ResetElectionTimer(now);
}

void Node::BecomeFollower(Term term, std::optional<NodeId> leader, SimTime now) {
  if (term > term_) {
    term_ = term;
    voted_for_.reset();
  }
  role_ = Role::kFollower;
  leader_ = leader;
  votes_.clear();
  ResetElectionTimer(now);
}

void Node::StartElection(SimTime now, Output& out) {
  role_ = Role::kCandidate;
  ++term_;
  voted_for_ = self_;
  leader_.reset();
  votes_.assign(1, self_);
  ResetElectionTimer(now);
  if (votes_.size() >= quorum()) {
    BecomeLeader(now, out);
    return;
  }
  RequestVote rv{term_, self_, last_index(), last_term()};
  for (NodeId v : voters_) {
    if (v != self_) out.messages.push_back({v, rv});
  }
}

void Node::BecomeLeader(SimTime now, Output& out) {
  role_ = Role::kLeader;
  leader_ = self_;
  votes_.clear();
  next_index_.clear();
  match_index_.clear();
  out.became_leader = true;
  heartbeat_due_ = now + config_.tick * config_.heartbeat_ticks;
  // A no-op from the new term lets earlier-term entries commit.
  log_.push_back(LogEntry{last_index() + 1, term_, std::nullopt});
  BroadcastAppend(out);
  MaybeAdvanceCommit(out);
}

void Node::SendAppend(NodeId peer, Output& out) {
  LogIndex& next = NextFor(peer);
  next = std::clamp<LogIndex>(next, 1, last_index() + 1);
  AppendEntries ae;
  ae.term = term_;
  ae.leader = self_;
  ae.prev_index = next - 1;
  ae.prev_term = TermAt(ae.prev_index);
  ae.leader_commit = commit_index_;
  const LogIndex end = std::min<LogIndex>(last_index(), next - 1 + config_.max_batch);
  for (LogIndex i = next; i <= end; ++i) ae.entries.push_back(log_[i - 1]);
  // Optimistic pipelining; a rejection rewinds `next`.
  next = end + 1;
  out.messages.push_back({peer, std::move(ae)});
}

void Node::BroadcastAppend(Output& out) {
  for (NodeId p : Peers()) SendAppend(p, out);
}

void Node::SetCommit(LogIndex index, Output& out) {
  if (index <= commit_index_) return;
  commit_index_ = std::min(index, last_index());
  while (last_reported_ < commit_index_) {
    ++last_reported_;
    out.committed.push_back(log_[last_reported_ - 1]);
  }
}

void Node::MaybeAdvanceCommit(Output& out) {
  if (role_ != Role::kLeader) return;
  std::vector<LogIndex> matches;
  matches.reserve(voters_.size());
  for (NodeId v : voters_) {
    matches.push_back(v == self_ ? last_index() : MatchFor(v));
  }
  std::sort(matches.begin(), matches.end(), std::greater<>());
  const LogIndex candidate = matches[quorum() - 1];
  if (candidate > commit_index_ && TermAt(candidate) == term_) {
    SetCommit(candidate, out);
    // Followers and learners hear about the new commit index right away.
    BroadcastAppend(out);
  }
}

void Node::OnAppendEntries(const AppendEntries& m, SimTime now, Output& out) {
  if (m.term < term_) {
    out.messages.push_back({m.leader, AppendEntriesReply{term_, self_, false, 0, 0}});
    return;
  }
  if (role_ == Role::kLeader && m.term == term_) {
    throw InvariantViolation("two leaders in one term");
  }
  BecomeFollower(m.term, m.leader, now);

  if (m.prev_index > last_index()) {
    out.messages.push_back(
        {m.leader, AppendEntriesReply{term_, self_, false, 0, last_index() + 1}});
    return;
  }
  if (TermAt(m.prev_index) != m.prev_term) {
    // Skip back over the whole conflicting term in one round trip.
    const Term bad = TermAt(m.prev_index);
    LogIndex hint = m.prev_index;
    while (hint > 1 && TermAt(hint - 1) == bad) --hint;
    out.messages.push_back({m.leader, AppendEntriesReply{term_, self_, false, 0, hint}});
    return;
  }

  LogIndex index = m.prev_index;
  for (const LogEntry& e : m.entries) {
    ++index;
    if (index <= last_index()) {
      if (log_[index - 1].term == e.term) continue;
      if (index <= commit_index_) {
        throw InvariantViolation("leader tried to overwrite a committed entry");
      }
      log_.resize(index - 1);
    }
    log_.push_back(e);
  }
  const LogIndex last_new = m.prev_index + m.entries.size();
  if (m.leader_commit > commit_index_) SetCommit(std::min(m.leader_commit, last_new), out);
  out.messages.push_back({m.leader, AppendEntriesReply{term_, self_, true, last_new, 0}});
}

void Node::OnAppendEntriesReply(const AppendEntriesReply& m, SimTime now, Output& out) {
  if (m.term > term_) {
    BecomeFollower(m.term, std::nullopt, now);
    return;
  }
  if (role_ != Role::kLeader || m.term < term_) return;
  if (m.success) {
    LogIndex& match = MatchFor(m.from);
    match = std::max(match, m.match_index);
    LogIndex& next = NextFor(m.from);
    next = std::max(next, match + 1);
    MaybeAdvanceCommit(out);
    if (next <= last_index()) SendAppend(m.from, out);
    return;
  }
  LogIndex& next = NextFor(m.from);
  const LogIndex floor = MatchFor(m.from) + 1;
  next = std::max(floor, std::min(next, m.next_hint));
  SendAppend(m.from, out);
}

void Node::OnRequestVote(const RequestVote& m, SimTime now, Output& out) {
  if (learner_) return;
  if (m.term > term_) BecomeFollower(m.term, std::nullopt, now);
  bool grant = false;
  if (m.term == term_ && (!voted_for_ || *voted_for_ == m.candidate)) {
    const bool up_to_date = m.last_term > last_term() ||
                            (m.last_term == last_term() && m.last_index >= last_index());
    if (up_to_date) {
      grant = true;
      voted_for_ = m.candidate;
      ResetElectionTimer(now);
    }
  }
  out.messages.push_back({m.candidate, RequestVoteReply{term_, self_, grant}});
}

void Node::OnRequestVoteReply(const RequestVoteReply& m, SimTime now, Output& out) {
  if (m.term > term_) {
    BecomeFollower(m.term, std::nullopt, now);
    return;
  }
  if (role_ != Role::kCandidate || m.term < term_ || !m.granted) return;
  if (std::find(votes_.begin(), votes_.end(), m.from) == votes_.end()) votes_.push_back(m.from);
  if (votes_.size() >= quorum()) BecomeLeader(now, out);
}

}  // namespace sgkv::raft
