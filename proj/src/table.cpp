/*
 * Licensed to the Apache Software Foundation (ASF) under one
 * or more contributor license agreements.  See the NOTICE file
 * distributed with this work for additional information
 * regarding copyright ownership.  The ASF licenses this file
 * to you under the Apache License, Version 2.0 (the
 * "License"); you may not use this file except in compliance
 * with the License.  You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing,
 * software distributed under the License is distributed on an
 * "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
 * KIND, either express or implied.  See the License for the
 * specific language governing permissions and limitations
 * under the License.
 */

#include "lakedq/table.hpp"

#include <chrono>
#include <fstream>

#include "lakedq/errors.hpp"

namespace lakedq {

const char* operation_name(Operation op) {
  switch (op) {
    case Operation::kAppend:
      return "append";
    case Operation::kOverwrite:
      return "overwrite";
    case Operation::kDelete:
      return "delete";
    case Operation::kCompaction:
      return "compaction";
    case Operation::kSort:
      return "sort";
    case Operation::kPurge:
      return "purge";
  }
  return "?";
}

std::optional<Operation> operation_from_name(std::string_view name) {
  if (name == "append") return Operation::kAppend;
  if (name == "overwrite") return Operation::kOverwrite;
  if (name == "delete") return Operation::kDelete;
  if (name == "compaction") return Operation::kCompaction;
  if (name == "sort") return Operation::kSort;
  if (name == "purge") return Operation::kPurge;
  return std::nullopt;
}

const Snapshot& TableMetadata::snapshot(uint64_t snapshot_id) const {
  for (const auto& s : snapshot_log)
    if (s.snapshot_id == snapshot_id) return s;
  throw UnknownSnapshotError(snapshot_id);
}

const Snapshot* TableMetadata::current() const {
  if (current_snapshot_id == 0) return nullptr;
  return &snapshot(current_snapshot_id);
}

Clock system_clock_micros() {
  return [] {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

nlohmann::json snapshot_to_json(const Snapshot& s) {
  nlohmann::json j{{"id", s.snapshot_id},
                   {"ts", s.commit_ts},
                   {"writer", s.writer_identity},
                   {"op", operation_name(s.operation)},
                   {"manifest", s.manifest_path},
                   {"summary", s.summary}};
  if (s.parent_id) j["parent"] = *s.parent_id;
  return j;
}

Snapshot snapshot_from_json(const nlohmann::json& j) {
  Snapshot s;
  s.snapshot_id = j.at("id").get<uint64_t>();
  if (j.contains("parent")) s.parent_id = j.at("parent").get<uint64_t>();
  s.commit_ts = j.at("ts").get<int64_t>();
  s.writer_identity = j.at("writer").get<std::string>();
  const std::string op = j.at("op").get<std::string>();
  auto parsed = operation_from_name(op);
  if (!parsed) throw FormatError("unknown operation: " + op);
  s.operation = *parsed;
  s.manifest_path = j.at("manifest").get<std::string>();
  s.summary = j.at("summary").get<std::map<std::string, std::string>>();
  return s;
}

namespace {

nlohmann::json table_to_json(const TableMetadata& meta) {
  nlohmann::json constraints = nlohmann::json::array();
  for (const auto& c : meta.constraints) {
    constraints.push_back(
        {{"id", c.constraint_id}, {"expr", c.expression}, {"scope", c.scope}});
  }
  return {{"name", meta.table_name},
          {"schema", meta.schema.to_json()},
          {"stats_priority", meta.stats_priority},
          {"constraints", std::move(constraints)},
          {"current_snapshot_id", meta.current_snapshot_id},
          {"next_file_id", meta.next_file_id}};
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw FileIoError("cannot write " + tmp.string());
    f << text;
    f.flush();
    if (!f) throw FileIoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);  // atomic commit point
}

}  // namespace

void init_table(const TableDir& dir, const std::string& table_name, const TableSchema& schema,
                std::vector<uint32_t> stats_priority) {
  if (std::filesystem::exists(dir.table_json()))
    throw ConfigError("table already exists: " + dir.root().string());
  if (stats_priority.empty()) {
    for (const auto& c : schema.columns()) {
      if (stats_priority.size() == kStatsColumnCap) break;
      stats_priority.push_back(c.column_id);
    }
  }
  if (stats_priority.size() > kStatsColumnCap)
    throw ConfigError("stats_priority exceeds the column cap");
  for (uint32_t id : stats_priority) schema.by_id(id);  // membership check

  std::filesystem::create_directories(dir.metadata_dir());
  std::filesystem::create_directories(dir.data_dir());
  std::filesystem::create_directories(dir.deletes_dir());
  std::filesystem::create_directories(dir.sketches_dir());

  TableMetadata meta;
  meta.table_name = table_name;
  meta.schema = schema;
  meta.stats_priority = std::move(stats_priority);
  save_table_json(dir, meta);
}

TableMetadata load_table(const TableDir& dir) {
  std::ifstream f(dir.table_json(), std::ios::binary);
  if (!f) throw FileIoError("no table at " + dir.root().string());
  nlohmann::json j = nlohmann::json::parse(f);

  TableMetadata meta;
  meta.table_name = j.at("name").get<std::string>();
  meta.schema = TableSchema::from_json(j.at("schema"));
  meta.stats_priority = j.at("stats_priority").get<std::vector<uint32_t>>();
  for (const auto& jc : j.at("constraints")) {
    meta.constraints.push_back({jc.at("id").get<std::string>(),
                                jc.at("expr").get<std::string>(),
                                jc.at("scope").get<std::string>()});
  }
  meta.current_snapshot_id = j.at("current_snapshot_id").get<uint64_t>();
  meta.next_file_id = j.at("next_file_id").get<uint64_t>();

  std::ifstream log(dir.snapshots_log(), std::ios::binary);
  if (log) {
    std::string line;
    while (std::getline(log, line)) {
      if (line.empty()) continue;
      Snapshot s = snapshot_from_json(nlohmann::json::parse(line));
      // ids are monotone, so anything beyond the committed pointer is a torn
      // commit leftover
      if (s.snapshot_id > meta.current_snapshot_id) continue;
      meta.snapshot_log.push_back(std::move(s));
    }
  }
  if (meta.current_snapshot_id != 0) meta.snapshot(meta.current_snapshot_id);
  return meta;
}

void save_table_json(const TableDir& dir, const TableMetadata& meta) {
  write_text_atomic(dir.table_json(), table_to_json(meta).dump(2) + "\n");
}

void append_snapshot_log(const TableDir& dir, const Snapshot& snap) {
  std::ofstream f(dir.snapshots_log(), std::ios::binary | std::ios::app);
  if (!f) throw FileIoError("cannot append snapshot log");
  f << snapshot_to_json(snap).dump() << '\n';
  f.flush();
  if (!f) throw FileIoError("snapshot log append failed");
}

nlohmann::json event_to_json(const CommitEvent& e) {
  nlohmann::json deltas = nlohmann::json::object();
  for (const auto& [part, d] : e.partition_record_delta) deltas[part] = d;
  return nlohmann::json{{"snapshot", e.snapshot_id},
                        {"ts", e.commit_ts},
                        {"writer", e.writer_identity},
                        {"op", operation_name(e.operation)},
                        {"partitions", e.partitions},
                        {"deltas", deltas}};
}

CommitEvent event_from_json(const nlohmann::json& j) {
  CommitEvent e;
  e.snapshot_id = j.at("snapshot").get<uint64_t>();
  e.commit_ts = j.at("ts").get<int64_t>();
  e.writer_identity = j.at("writer").get<std::string>();
  auto op = operation_from_name(j.at("op").get<std::string>());
  if (!op) throw FormatError("unknown operation in event: " + j.at("op").get<std::string>());
  e.operation = *op;
  for (const auto& p : j.at("partitions")) e.partitions.push_back(p.get<std::string>());
  for (const auto& [part, d] : j.at("deltas").items())
    e.partition_record_delta[part] = d.get<int64_t>();
  return e;
}

void append_event(const TableDir& dir, const CommitEvent& e) {
  std::ofstream f(dir.events_log(), std::ios::binary | std::ios::app);
  if (!f) throw FileIoError("cannot append event log");
  f << event_to_json(e).dump() << '\n';
}

std::vector<CommitEvent> read_events(const TableDir& dir) {
  std::vector<CommitEvent> out;
  std::ifstream f(dir.events_log(), std::ios::binary);
  if (!f) return out;  // no commits yet
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    out.push_back(event_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

Manifest live_files(const TableDir& dir, const TableMetadata& meta, uint64_t snapshot_id,
                    const std::optional<std::string>& partition_filter) {
  if (snapshot_id == 0) return {};
  const Snapshot& snap = meta.snapshot(snapshot_id);
  Manifest m = read_manifest(dir.resolve(snap.manifest_path));
  if (!partition_filter) return m;
  Manifest filtered;
  for (auto& e : m.data_files)
    if (e.partition_key == *partition_filter) filtered.data_files.push_back(std::move(e));
  for (auto& e : m.delete_files)
    if (e.partition_key == *partition_filter) filtered.delete_files.push_back(std::move(e));
  return filtered;
}

}  // namespace lakedq
