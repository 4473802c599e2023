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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lakedq/stats.hpp"

namespace lakedq {

inline constexpr size_t kStatsColumnCap = 200;

struct DataFileEntry {
  std::string file_path;  // relative to the table root
  std::string partition_key;
  uint64_t record_count = 0;
  uint64_t file_size_bytes = 0;
  std::vector<ColumnStats> column_stats;  // at most kStatsColumnCap entries
  std::optional<std::string> sketch_sidecar_path;

  const ColumnStats* find_stats(uint32_t column_id) const;

  bool operator==(const DataFileEntry&) const = default;
};

struct DeleteTarget {
  std::string data_file_path;
  std::vector<uint64_t> positions;  // row ordinals within the target file

  bool operator==(const DeleteTarget&) const = default;
};

struct DeleteFileEntry {
  std::string file_path;  // relative to the table root
  std::string partition_key;
  uint64_t delete_count = 0;  // total (file, position) pairs
  std::vector<DeleteTarget> targets;

  bool operator==(const DeleteFileEntry&) const = default;
};

// One snapshot's complete live file set.
struct Manifest {
  std::vector<DataFileEntry> data_files;
  std::vector<DeleteFileEntry> delete_files;

  bool operator==(const Manifest&) const = default;
};

// Typed bound serialization: {"t":"i|f|s|b","v":...}. Truncated string
// bounds can hold non-UTF-8 bytes, which JSON cannot carry verbatim; those
// fall back to {"t":"sx","v":"<hex>"}.
nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

nlohmann::json column_stats_to_json(const ColumnStats& s);
ColumnStats column_stats_from_json(const nlohmann::json& j);

// JSONL: one line per entry, data files then delete files, each line tagged
// with "kind".
void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

// Sums counts, folds bounds, collects per-file sum terms over the given live
// set. Order of entries does not matter. Throws MissingStatsError when a
// live file carries no stats block for the column.
AggregatedColumnStats aggregate_stats(const std::vector<DataFileEntry>& entries,
                                      uint32_t column_id);

// Total record_count across entries (no delete correction).
uint64_t total_record_count(const std::vector<DataFileEntry>& entries);

// Base rows minus positional deletes, whole manifest and per partition.
uint64_t corrected_record_count(const Manifest& m);
std::map<std::string, int64_t> per_partition_corrected(const Manifest& m);

// Deleted positions per target data file, across all delete entries.
std::map<std::string, std::set<uint64_t>> deleted_positions(const Manifest& m);

}  // namespace lakedq
