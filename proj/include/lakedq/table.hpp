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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lakedq/manifest.hpp"
#include "lakedq/schema.hpp"

namespace lakedq {

enum class Operation : uint8_t { kAppend, kOverwrite, kDelete, kCompaction, kSort, kPurge };

const char* operation_name(Operation op);
std::optional<Operation> operation_from_name(std::string_view name);
// Maintenance commits rewrite layout, not content; quality signals skip them.
inline bool is_maintenance(Operation op) {
  return op == Operation::kCompaction || op == Operation::kSort || op == Operation::kPurge;
}

inline constexpr const char* kMaintenanceWriter = "system-maintenance";

struct Snapshot {
  uint64_t snapshot_id = 0;
  std::optional<uint64_t> parent_id;
  int64_t commit_ts = 0;  // micros since epoch
  std::string writer_identity;
  Operation operation = Operation::kAppend;
  std::string manifest_path;  // relative to the table root
  std::map<std::string, std::string> summary;

  bool operator==(const Snapshot&) const = default;
};

struct ConstraintDef {
  std::string constraint_id;
  std::string expression;
  std::string scope = "whole-table";  // or "per-commit-delta"

  bool operator==(const ConstraintDef&) const = default;
};

// snapshot_id 0 means "no snapshot yet"; real ids start at 1.
struct TableMetadata {
  std::string table_name;
  TableSchema schema;
  std::vector<uint32_t> stats_priority;
  std::vector<ConstraintDef> constraints;
  uint64_t current_snapshot_id = 0;
  uint64_t next_file_id = 0;
  std::vector<Snapshot> snapshot_log;

  const Snapshot& snapshot(uint64_t snapshot_id) const;  // UnknownSnapshotError
  const Snapshot* current() const;  // nullptr on an empty table
};

// Path helper for the fixed on-disk layout.
class TableDir {
 public:
  explicit TableDir(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path metadata_dir() const { return root_ / "metadata"; }
  std::filesystem::path table_json() const { return metadata_dir() / "table.json"; }
  std::filesystem::path snapshots_log() const { return metadata_dir() / "snapshots.jsonl"; }
  std::filesystem::path manifest_file(uint64_t snapshot_id) const {
    return metadata_dir() / ("manifest-" + std::to_string(snapshot_id) + ".jsonl");
  }
  std::filesystem::path events_log() const { return metadata_dir() / "events.jsonl"; }
  std::filesystem::path rules_file() const { return metadata_dir() / "rules.dq"; }
  std::filesystem::path alerts_log() const { return metadata_dir() / "alerts.jsonl"; }
  std::filesystem::path data_dir() const { return root_ / "data"; }
  std::filesystem::path deletes_dir() const { return root_ / "deletes"; }
  std::filesystem::path sketches_dir() const { return root_ / "sketches"; }
  std::filesystem::path lock_file() const { return metadata_dir() / "LOCK"; }

  std::filesystem::path resolve(const std::string& relative) const { return root_ / relative; }

 private:
  std::filesystem::path root_;
};

// Injectable time source, micros since epoch.
using Clock = std::function<int64_t()>;
Clock system_clock_micros();

// Creates the directory skeleton and an empty table.json.
void init_table(const TableDir& dir, const std::string& table_name, const TableSchema& schema,
                std::vector<uint32_t> stats_priority = {});

// Reads table.json plus the snapshot log. Log lines beyond
// current_snapshot_id (torn commit leftovers) are dropped.
TableMetadata load_table(const TableDir& dir);

// Atomically replaces table.json (temp file + rename); this is the commit
// point for all metadata mutations.
void save_table_json(const TableDir& dir, const TableMetadata& meta);

void append_snapshot_log(const TableDir& dir, const Snapshot& snap);

nlohmann::json snapshot_to_json(const Snapshot& s);
Snapshot snapshot_from_json(const nlohmann::json& j);

// Live file set at a snapshot, optionally restricted to one partition.
// Supports time travel to any logged snapshot; snapshot_id 0 (or an empty
// table) yields an empty manifest.
Manifest live_files(const TableDir& dir, const TableMetadata& meta, uint64_t snapshot_id,
                    const std::optional<std::string>& partition_filter = std::nullopt);

// One line of events.jsonl, appended after a commit publishes. The delta is
// the per-partition change in corrected record count (negative for deletes).
struct CommitEvent {
  uint64_t snapshot_id = 0;
  int64_t commit_ts = 0;
  std::string writer_identity;
  Operation operation = Operation::kAppend;
  std::vector<std::string> partitions;  // touched by this commit, sorted
  std::map<std::string, int64_t> partition_record_delta;

  bool operator==(const CommitEvent&) const = default;
};

nlohmann::json event_to_json(const CommitEvent& e);
CommitEvent event_from_json(const nlohmann::json& j);
void append_event(const TableDir& dir, const CommitEvent& e);
std::vector<CommitEvent> read_events(const TableDir& dir);

}  // namespace lakedq
