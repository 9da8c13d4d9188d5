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

#include "sgkv/trace.h"

#include <array>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace sgkv {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 15> kKindNames = {
    "GetIssued",     "GetServed",    "GetReplied", "PutIssued",    "PutCommittedAtServer",
    "PutReplied",    "CommitApplied", "SvSnapshot", "Parked",       "OpTimeout",
    "BecameLeader",  "XdcDeliver",   "Crash",      "Restart",      "FinalSnapshot",
};

ordered_json Stamp(HlcTimestamp t) {
  ordered_json j;
  j["l"] = t.l();
  j["c"] = t.c();
  return j;
}

std::string Str(const ordered_json& j) { return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace); }

template <typename E, typename Parse>
E ParseEnum(const ordered_json& j, Parse parse, const char* what) {
  auto v = parse(j.get<std::string>());
  if (!v) throw std::runtime_error(std::string("unknown ") + what + ": " + j.get<std::string>());
  return *v;
}

std::optional<OpKind> ParseOp(std::string_view s) {
  if (s == "get") return OpKind::kGet;
  if (s == "put") return OpKind::kPut;
  return std::nullopt;
}

ordered_json EventJson(const TraceEvent& e) {
  ordered_json j;
  j["kind"] = ToString(e.kind);
  j["seq"] = e.seq;
  j["time"] = e.time;
  j["node"] = e.node;
  j["peer"] = e.peer;
  j["client"] = e.client;
  j["req"] = e.req;
  j["group"] = e.group;
  j["key"] = e.key;
  j["version"] = ordered_json::array({e.version.dc, e.version.idx});
  j["found"] = e.found;
  j["t"] = Stamp(e.t);
  j["log_idx"] = e.log_idx;
  j["term"] = e.term;
  j["dc"] = e.dc;
  j["op"] = e.op == OpKind::kGet ? "get" : "put";
  j["read_level"] = ToString(e.read_level);
  j["write_level"] = ToString(e.write_level);
  j["sv"] = e.sv;
  j["hrv"] = e.hrv;
  j["hwv"] = e.hwv;
  j["detail"] = e.detail;
  return j;
}

TraceEvent EventFromJson(const ordered_json& j) {
  TraceEvent e;
  e.kind = ParseEnum<EventKind>(j.at("kind"), ParseEventKind, "event kind");
  e.seq = j.at("seq").get<uint64_t>();
  e.time = j.at("time").get<SimTime>();
  e.node = j.at("node").get<NodeId>();
  e.peer = j.at("peer").get<NodeId>();
  e.client = j.at("client").get<ClientId>();
  e.req = j.at("req").get<RequestId>();
  e.group = j.at("group").get<int>();
  e.key = j.at("key").get<std::string>();
  e.version = {j.at("version").at(0).get<DcId>(), j.at("version").at(1).get<LogIndex>()};
  e.found = j.at("found").get<bool>();
  e.t = HlcTimestamp(j.at("t").at("l").get<uint64_t>(), j.at("t").at("c").get<uint64_t>());
  e.log_idx = j.at("log_idx").get<LogIndex>();
  e.term = j.at("term").get<Term>();
  e.dc = j.at("dc").get<DcId>();
  e.op = ParseEnum<OpKind>(j.at("op"), ParseOp, "op");
  e.read_level = ParseEnum<ReadLevel>(j.at("read_level"), ParseReadLevel, "read level");
  e.write_level = ParseEnum<WriteLevel>(j.at("write_level"), ParseWriteLevel, "write level");
  e.sv = j.at("sv").get<IndexVector>();
  e.hrv = j.at("hrv").get<IndexVector>();
  e.hwv = j.at("hwv").get<IndexVector>();
  e.detail = j.at("detail").get<std::string>();
  return e;
}

}  // namespace

std::string_view ToString(EventKind k) { return kKindNames.at(static_cast<size_t>(k)); }

std::optional<EventKind> ParseEventKind(std::string_view s) {
  for (size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

std::string SerializeHeader(const TraceHeader& h) {
  ordered_json j;
  j["schema"] = h.schema;
  j["seed"] = h.seed;
  j["config_hash"] = h.config_hash;
  j["dcs"] = h.dcs;
  j["partitions"] = h.partitions;
  j["config"] = h.config_json.empty() ? ordered_json::object() : ordered_json::parse(h.config_json);
  return Str(j);
}

std::string SerializeEvent(const TraceEvent& e) { return Str(EventJson(e)); }

void WriteTrace(std::ostream& os, const TraceHeader& header, const std::vector<TraceEvent>& events) {
  os << SerializeHeader(header) << '\n';
  for (const auto& e : events) os << SerializeEvent(e) << '\n';
  if (!os) throw std::runtime_error("trace write failed");
}

ParsedTrace ReadTrace(std::istream& is) {
  ParsedTrace out;
  std::string line;
  size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = ordered_json::parse(line);
      if (!have_header) {
        out.header.schema = j.at("schema").get<std::string>();
        if (out.header.schema != kTraceSchema) {
          throw std::runtime_error("unsupported schema " + out.header.schema);
        }
        out.header.seed = j.at("seed").get<uint64_t>();
        out.header.config_hash = j.at("config_hash").get<uint64_t>();
        out.header.dcs = j.at("dcs").get<int>();
        out.header.partitions = j.at("partitions").get<int>();
        out.header.config_json = Str(j.at("config"));
        have_header = true;
      } else {
        out.events.push_back(EventFromJson(j));
      }
    } catch (const std::exception& ex) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  if (!have_header) throw std::runtime_error("trace has no header record");
  return out;
}

uint64_t TraceHash(const TraceHeader& header, const std::vector<TraceEvent>& events) {
  uint64_t h = Fnv1a(SerializeHeader(header));
  for (const auto& e : events) h = Fnv1a(SerializeEvent(e), h);
  return h;
}

}  // namespace sgkv
