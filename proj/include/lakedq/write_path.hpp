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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lakedq/manifest.hpp"
#include "lakedq/sidecar.hpp"
#include "lakedq/table.hpp"

namespace lakedq {

inline constexpr size_t kDefaultMaxRowsPerFile = 10000;

using Row = std::vector<Value>;

// Pull-based row source. write_files() calls next() exactly once per input
// row; fetched() exposes that count so tests can assert single-pass reads.
class RowStream {
 public:
  virtual ~RowStream() = default;

  // nullptr signals end of stream. The pointee stays valid until the next
  // call.
  virtual const Row* next() = 0;
  virtual uint64_t fetched() const = 0;
};

class VectorRowStream : public RowStream {
 public:
  explicit VectorRowStream(const std::vector<Row>& rows) : rows_(rows) {}

  const Row* next() override {
    if (pos_ >= rows_.size()) return nullptr;
    return &rows_[pos_++];
  }
  uint64_t fetched() const override { return pos_; }

 private:
  const std::vector<Row>& rows_;
  size_t pos_ = 0;
};

struct WriteBatch {
  std::string partition_key;
  std::vector<Row> rows;
};

// One encoding pass per file: the CSV bytes, every stats counter and both
// sketch kinds are fed from the same row visit. Emits data/f<N>.csv plus
// sketches/f<N>.zsb per chunk of at most max_rows_per_file rows, consuming
// ids from meta.next_file_id. A zero-row stream yields no files.
// Rejects wrong arity, type mismatches, nulls in non-nullable columns and
// non-finite floats before any metadata is touched.
std::vector<DataFileEntry> write_files(const TableDir& dir, TableMetadata& meta,
                                       const std::string& partition_key, RowStream& rows,
                                       size_t max_rows_per_file = kDefaultMaxRowsPerFile);

// Reads a data file back into rows through the counted open channel.
// Header row must match the schema column names.
std::vector<Row> read_data_rows(const TableDir& dir, const std::string& rel_path,
                                const TableSchema& schema);

// Single-table store with optimistic commits. Every mutation runs the same
// commit path: take the lock file, re-check the snapshot pointer, validate
// delete vectors, enforce constraints on metadata alone, then publish by
// atomically replacing table.json. A rejected commit leaves the metadata
// directory byte-identical.
class TableStore {
 public:
  explicit TableStore(TableDir dir, std::string writer_identity = "local-writer",
                      Clock clock = system_clock_micros());

  const TableDir& dir() const { return dir_; }
  const TableMetadata& meta() const { return meta_; }
  TableMetadata& meta() { return meta_; }

  Snapshot append(const WriteBatch& batch, size_t max_rows_per_file = kDefaultMaxRowsPerFile);
  Snapshot append(const std::string& partition_key, RowStream& rows,
                  size_t max_rows_per_file = kDefaultMaxRowsPerFile);

  // Replaces the partition's live files (and its delete vectors) with the
  // batch contents.
  Snapshot overwrite(const WriteBatch& batch, size_t max_rows_per_file = kDefaultMaxRowsPerFile);
  Snapshot overwrite(const std::string& partition_key, RowStream& rows,
                     size_t max_rows_per_file = kDefaultMaxRowsPerFile);

  // Positional deletes without touching data files (merge-on-read). Each
  // pair is (live data file path, 0-based row position).
  Snapshot delete_rows(const std::string& partition_key,
                       const std::vector<std::pair<std::string, uint64_t>>& positions);

  // Rewrites one partition applying its delete vectors; stats of the result
  // are recomputed from the surviving rows in the usual single pass.
  Snapshot compact(const std::string& partition_key);

  // sort / purge style commits that keep the live set unchanged. Exercises
  // maintenance filtering downstream.
  Snapshot maintenance_noop(Operation op);

  // Parses and registers; rejects anything outside the metadata-computable
  // term set. Persisted via the same atomic table.json swap.
  void add_constraint(const ConstraintDef& def);

  // Core commit step shared by the mutations above. next_live is the full
  // manifest the new snapshot points at; added are entries new in this
  // commit (per-commit-delta constraint scope sees only these).
  Snapshot commit(Manifest next_live, Operation op,
                  const std::vector<DataFileEntry>& added);

 private:
  void check_not_stale() const;
  void validate_deletes(const Manifest& next_live) const;

  TableDir dir_;
  TableMetadata meta_;
  std::string writer_;
  Clock clock_;
};

// Held for the duration of a commit. Creation is O_EXCL so a second writer
// fails fast instead of corrupting the log.
class CommitLock {
 public:
  explicit CommitLock(const std::filesystem::path& lock_path);
  ~CommitLock();
  CommitLock(const CommitLock&) = delete;
  CommitLock& operator=(const CommitLock&) = delete;

 private:
  std::filesystem::path path_;
};

}  // namespace lakedq
