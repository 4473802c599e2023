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

#include "lakedq/write_path.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "lakedq/constraint.hpp"
#include "lakedq/csv.hpp"
#include "lakedq/io_counter.hpp"
#include "lakedq/kll_sketch.hpp"
#include "lakedq/sketch_merge.hpp"
#include "lakedq/theta_sketch.hpp"

namespace lakedq {

namespace {

void check_row(const Row& row, const TableSchema& schema, uint64_t row_index) {
  if (row.size() != schema.size())
    throw CorruptDataFileError("row " + std::to_string(row_index) + " has " +
                               std::to_string(row.size()) + " fields, schema has " +
                               std::to_string(schema.size()));
  for (size_t i = 0; i < row.size(); ++i) {
    const ColumnSchema& col = schema.column_at(i);
    const Value& v = row[i];
    if (is_null(v)) {
      if (!col.nullable) throw NullInNonNullableError(row_index, col.name);
      continue;
    }
    if (!value_matches_kind(v, col.kind))
      throw TypeMismatchError(row_index, col.name,
                              "value does not match column type " +
                                  std::string(kind_name(col.kind)));
    // NaN is data (tracked by nan_count); infinities have no stats story.
    if (col.kind == ValueKind::kFloat64) {
      double d = std::get<double>(v);
      if (std::isinf(d))
        throw NonFiniteValueError("infinite value at row " + std::to_string(row_index) +
                                  ", column " + col.name);
    }
  }
}

}  // namespace

std::vector<DataFileEntry> write_files(const TableDir& dir, TableMetadata& meta,
                                       const std::string& partition_key, RowStream& rows,
                                       size_t max_rows_per_file) {
  if (max_rows_per_file == 0) throw ConfigError("max_rows_per_file must be positive");
  const TableSchema& schema = meta.schema;

  struct PriorityColumn {
    size_t index;  // position in the row
    const ColumnSchema* col;
  };
  std::vector<PriorityColumn> prio;
  prio.reserve(meta.stats_priority.size());
  for (uint32_t id : meta.stats_priority) {
    const ColumnSchema& c = schema.by_id(id);
    size_t index = 0;
    while (schema.column_at(index).column_id != id) ++index;
    prio.push_back({index, &c});
  }

  std::string header;
  {
    std::vector<std::string> names;
    for (const auto& c : schema.columns()) names.push_back(c.name);
    csv::append_record(header, names, std::vector<bool>(names.size(), false));
  }

  std::vector<DataFileEntry> out;
  uint64_t row_index = 0;
  const Row* row = rows.next();
  while (row) {
    uint64_t file_id = meta.next_file_id++;
    std::string stem = "f" + std::to_string(file_id);
    DataFileEntry entry;
    entry.file_path = "data/" + stem + ".csv";
    entry.partition_key = partition_key;

    std::ofstream csv(dir.resolve(entry.file_path), std::ios::binary | std::ios::trunc);
    if (!csv) throw FileIoError("cannot create " + entry.file_path);
    csv << header;

    std::vector<StatsAccumulator> acc;
    std::map<uint32_t, ThetaSketch> theta;
    std::map<uint32_t, KllSketch> kll;
    acc.reserve(prio.size());
    for (const auto& p : prio) {
      acc.emplace_back(p.col->column_id, p.col->kind);
      if (theta_eligible(p.col->kind)) theta.emplace(p.col->column_id, ThetaSketch());
      if (kll_eligible(p.col->kind)) kll.emplace(p.col->column_id, KllSketch());
    }

    // Single encoding pass: each row is formatted once and the same visit
    // feeds the CSV line, the counters and the sketches.
    std::string line;
    std::vector<std::string> encoded(schema.size());
    uint64_t n = 0;
    while (row && n < max_rows_per_file) {
      check_row(*row, schema, row_index);
      line.clear();
      for (size_t i = 0; i < schema.size(); ++i) {
        const ColumnSchema& col = schema.column_at(i);
        const Value& v = (*row)[i];
        // Empty non-null strings are quoted so they stay distinguishable
        // from null on read-back.
        bool force = col.kind == ValueKind::kString && !is_null(v) &&
                     std::get<std::string>(v).empty();
        encoded[i] = csv::encode_field(format_value(v, col.kind), force);
        if (i) line += ',';
        line += encoded[i];
      }
      line += '\n';
      csv << line;

      for (size_t p = 0; p < prio.size(); ++p) {
        const Value& v = (*row)[prio[p].index];
        ValueKind kind = prio[p].col->kind;
        uint32_t id = prio[p].col->column_id;
        acc[p].update(v, encoded[prio[p].index].size());
        if (is_null(v)) continue;
        if (auto it = theta.find(id); it != theta.end()) it->second.update(v, kind);
        if (auto it = kll.find(id); it != kll.end()) {
          double d = *value_as_double(v, kind);
          if (!std::isnan(d)) it->second.update(d);
        }
      }
      ++n;
      ++row_index;
      row = rows.next();
    }

    csv.flush();
    if (!csv) throw FileIoError("write failed for " + entry.file_path);
    csv.close();

    entry.record_count = n;
    entry.file_size_bytes = std::filesystem::file_size(dir.resolve(entry.file_path));
    for (auto& a : acc) entry.column_stats.push_back(a.finish());

    SketchSidecar sidecar;
    for (const auto& p : prio) {
      if (auto it = theta.find(p.col->column_id); it != theta.end())
        sidecar.blobs.push_back({kBlobTheta, p.col->column_id, it->second.serialize()});
    }
    for (const auto& p : prio) {
      if (auto it = kll.find(p.col->column_id); it != kll.end())
        sidecar.blobs.push_back({kBlobKll, p.col->column_id, it->second.serialize()});
    }
    if (!sidecar.blobs.empty()) {
      entry.sketch_sidecar_path = "sketches/" + stem + ".zsb";
      sidecar_write(dir.resolve(*entry.sketch_sidecar_path), sidecar);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<Row> read_data_rows(const TableDir& dir, const std::string& rel_path,
                                const TableSchema& schema) {
  std::string text = read_data_file(dir.resolve(rel_path));
  std::vector<csv::Record> records;
  csv::Parser parser;
  parser.feed(text, records);
  parser.finish(records);
  if (records.empty()) throw CorruptDataFileError(rel_path + ": missing header row");

  const csv::Record& head = records[0];
  if (head.size() != schema.size())
    throw CorruptDataFileError(rel_path + ": header arity mismatch");
  for (size_t i = 0; i < head.size(); ++i)
    if (head[i].text != schema.column_at(i).name)
      throw CorruptDataFileError(rel_path + ": header names do not match schema");

  std::vector<Row> rows;
  rows.reserve(records.size() - 1);
  for (size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (rec.size() != schema.size())
      throw CorruptDataFileError(rel_path + ": row " + std::to_string(r - 1) +
                                 " arity mismatch");
    Row row(rec.size());
    for (size_t i = 0; i < rec.size(); ++i) {
      try {
        row[i] = parse_value(rec[i].text, rec[i].quoted, schema.column_at(i).kind);
      } catch (const FormatError& e) {
        throw CorruptDataFileError(rel_path + ": row " + std::to_string(r - 1) + ", column " +
                                   schema.column_at(i).name + ": " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CommitLock::CommitLock(const std::filesystem::path& lock_path) : path_(lock_path) {
  int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST)
      throw ConcurrentWriterError("another writer holds " + path_.string());
    throw FileIoError("cannot create lock file " + path_.string() + ": " +
                      std::strerror(errno));
  }
  ::close(fd);
}

CommitLock::~CommitLock() { ::unlink(path_.c_str()); }

TableStore::TableStore(TableDir dir, std::string writer_identity, Clock clock)
    : dir_(std::move(dir)),
      meta_(load_table(dir_)),
      writer_(std::move(writer_identity)),
      clock_(std::move(clock)) {}

void TableStore::check_not_stale() const {
  TableMetadata fresh = load_table(dir_);
  if (fresh.current_snapshot_id != meta_.current_snapshot_id)
    throw StaleTableError("table advanced to snapshot " +
                          std::to_string(fresh.current_snapshot_id) + " behind this writer");
}

void TableStore::validate_deletes(const Manifest& next_live) const {
  std::map<std::string, const DataFileEntry*> by_path;
  for (const auto& e : next_live.data_files) by_path[e.file_path] = &e;

  std::set<std::pair<std::string, uint64_t>> seen;
  for (const auto& d : next_live.delete_files) {
    uint64_t pairs = 0;
    for (const auto& t : d.targets) {
      auto it = by_path.find(t.data_file_path);
      if (it == by_path.end())
        throw PositionOutOfRangeError("delete targets " + t.data_file_path +
                                      " which is not live");
      if (it->second->partition_key != d.partition_key)
        throw FormatError("delete entry partition " + d.partition_key +
                          " does not match target file partition " +
                          it->second->partition_key);
      for (uint64_t pos : t.positions) {
        if (pos >= it->second->record_count)
          throw PositionOutOfRangeError("position " + std::to_string(pos) + " >= " +
                                        std::to_string(it->second->record_count) + " in " +
                                        t.data_file_path);
        if (!seen.emplace(t.data_file_path, pos).second)
          throw DuplicateDeleteError("position " + std::to_string(pos) + " of " +
                                     t.data_file_path + " deleted twice");
        ++pairs;
      }
    }
    if (pairs != d.delete_count)
      throw FormatError("delete entry " + d.file_path + " count mismatch");
  }
}

Snapshot TableStore::commit(Manifest next_live, Operation op,
                            const std::vector<DataFileEntry>& added) {
  CommitLock lock(dir_.lock_file());
  check_not_stale();
  validate_deletes(next_live);

  int64_t now = clock_();
  int64_t parent_ts =
      meta_.current_snapshot_id != 0 ? meta_.current()->commit_ts : 0;
  int64_t commit_ts = std::max(now, parent_ts);  // commit_ts never regresses

  // Constraint gate. Runs before anything under metadata/ changes, so a
  // rejection leaves the committed state byte-identical, and it must hold
  // without opening a single data file.
  {
    ZeroScanGuard guard("commit constraint check");
    std::vector<Constraint> constraints = parse_constraints(meta_.constraints, meta_.schema);
    uint64_t live_deletes = 0;
    for (const auto& d : next_live.delete_files) live_deletes += d.delete_count;
    StatsProvider whole(next_live.data_files, live_deletes);
    StatsProvider delta(added, 0);
    for (const auto& c : constraints) {
      if (c.def().scope == kScopePerCommitDelta) {
        // Delta scope judges arriving data; delete and maintenance commits
        // add none.
        if (is_maintenance(op) || op == Operation::kDelete || added.empty()) continue;
        c.enforce(delta, commit_ts, now);
      } else {
        c.enforce(whole, commit_ts, now);
      }
    }
    guard.check();
  }

  // Per-partition corrected counts before and after, for the event record.
  std::map<std::string, int64_t> before =
      per_partition_corrected(live_files(dir_, meta_, meta_.current_snapshot_id));
  std::map<std::string, int64_t> after = per_partition_corrected(next_live);

  uint64_t id = meta_.current_snapshot_id + 1;
  Snapshot snap;
  snap.snapshot_id = id;
  if (meta_.current_snapshot_id != 0) snap.parent_id = meta_.current_snapshot_id;
  snap.commit_ts = commit_ts;
  snap.writer_identity = is_maintenance(op) ? std::string(kMaintenanceWriter) : writer_;
  snap.operation = op;
  snap.manifest_path = "metadata/manifest-" + std::to_string(id) + ".jsonl";
  snap.summary["data-files"] = std::to_string(next_live.data_files.size());
  snap.summary["delete-files"] = std::to_string(next_live.delete_files.size());
  snap.summary["records"] = std::to_string(corrected_record_count(next_live));

  write_manifest(dir_.manifest_file(id), next_live);
  append_snapshot_log(dir_, snap);
  meta_.snapshot_log.push_back(snap);
  meta_.current_snapshot_id = id;
  save_table_json(dir_, meta_);  // the commit point

  CommitEvent ev;
  ev.snapshot_id = id;
  ev.commit_ts = commit_ts;
  ev.writer_identity = snap.writer_identity;
  ev.operation = op;
  std::set<std::string> touched;
  for (const auto& e : added) touched.insert(e.partition_key);
  for (const auto& [part, count] : after) {
    auto it = before.find(part);
    int64_t delta_records = count - (it == before.end() ? 0 : it->second);
    if (delta_records != 0) touched.insert(part);
    ev.partition_record_delta[part] = delta_records;
  }
  for (const auto& [part, count] : before)
    if (!after.count(part)) {
      ev.partition_record_delta[part] = -count;
      if (count != 0) touched.insert(part);
    }
  std::erase_if(ev.partition_record_delta,
                [&](const auto& kv) { return !touched.count(kv.first); });
  ev.partitions.assign(touched.begin(), touched.end());
  append_event(dir_, ev);
  return snap;
}

Snapshot TableStore::append(const WriteBatch& batch, size_t max_rows_per_file) {
  VectorRowStream stream(batch.rows);
  return append(batch.partition_key, stream, max_rows_per_file);
}

Snapshot TableStore::append(const std::string& partition_key, RowStream& rows,
                            size_t max_rows_per_file) {
  Manifest next = live_files(dir_, meta_, meta_.current_snapshot_id);
  std::vector<DataFileEntry> added = write_files(dir_, meta_, partition_key, rows,
                                                 max_rows_per_file);
  next.data_files.insert(next.data_files.end(), added.begin(), added.end());
  return commit(std::move(next), Operation::kAppend, added);
}

Snapshot TableStore::overwrite(const WriteBatch& batch, size_t max_rows_per_file) {
  VectorRowStream stream(batch.rows);
  return overwrite(batch.partition_key, stream, max_rows_per_file);
}

Snapshot TableStore::overwrite(const std::string& partition_key, RowStream& rows,
                               size_t max_rows_per_file) {
  Manifest live = live_files(dir_, meta_, meta_.current_snapshot_id);
  Manifest next;
  for (auto& e : live.data_files)
    if (e.partition_key != partition_key) next.data_files.push_back(std::move(e));
  for (auto& d : live.delete_files)
    if (d.partition_key != partition_key) next.delete_files.push_back(std::move(d));
  std::vector<DataFileEntry> added = write_files(dir_, meta_, partition_key, rows,
                                                 max_rows_per_file);
  next.data_files.insert(next.data_files.end(), added.begin(), added.end());
  return commit(std::move(next), Operation::kOverwrite, added);
}

Snapshot TableStore::delete_rows(
    const std::string& partition_key,
    const std::vector<std::pair<std::string, uint64_t>>& positions) {
  if (positions.empty()) throw ConfigError("delete_rows needs at least one position");
  Manifest live = live_files(dir_, meta_, meta_.current_snapshot_id);

  std::map<std::string, std::vector<uint64_t>> by_file;
  for (const auto& [path, pos] : positions) by_file[path].push_back(pos);

  DeleteFileEntry entry;
  entry.partition_key = partition_key;
  entry.delete_count = positions.size();
  for (auto& [path, list] : by_file) {
    std::sort(list.begin(), list.end());
    DeleteTarget t;
    t.data_file_path = path;
    t.positions = std::move(list);
    entry.targets.push_back(std::move(t));
  }

  uint64_t file_id = meta_.next_file_id++;
  entry.file_path = "deletes/f" + std::to_string(file_id) + ".jsonl";
  {
    std::ofstream f(dir_.resolve(entry.file_path), std::ios::binary | std::ios::trunc);
    if (!f) throw FileIoError("cannot create " + entry.file_path);
    for (const auto& t : entry.targets)
      for (uint64_t pos : t.positions)
        f << nlohmann::json{{"file", t.data_file_path}, {"pos", pos}}.dump() << '\n';
    f.flush();
    if (!f) throw FileIoError("write failed for " + entry.file_path);
  }

  live.delete_files.push_back(std::move(entry));
  return commit(std::move(live), Operation::kDelete, {});
}

Snapshot TableStore::compact(const std::string& partition_key) {
  Manifest live = live_files(dir_, meta_, meta_.current_snapshot_id);
  std::vector<const DataFileEntry*> part_files;
  for (const auto& e : live.data_files)
    if (e.partition_key == partition_key) part_files.push_back(&e);
  if (part_files.empty())
    throw ConfigError("no live files in partition " + partition_key);

  Manifest part;
  for (const auto* e : part_files) part.data_files.push_back(*e);
  for (const auto& d : live.delete_files)
    if (d.partition_key == partition_key) part.delete_files.push_back(d);
  std::map<std::string, std::set<uint64_t>> dropped = deleted_positions(part);

  std::vector<Row> survivors;
  for (const auto* e : part_files) {
    std::vector<Row> rows = read_data_rows(dir_, e->file_path, meta_.schema);
    if (rows.size() != e->record_count)
      throw CorruptDataFileError(e->file_path + ": manifest says " +
                                 std::to_string(e->record_count) + " records, file has " +
                                 std::to_string(rows.size()));
    const std::set<uint64_t>* gone = nullptr;
    if (auto it = dropped.find(e->file_path); it != dropped.end()) gone = &it->second;
    for (uint64_t i = 0; i < rows.size(); ++i)
      if (!gone || !gone->count(i)) survivors.push_back(std::move(rows[i]));
  }

  Manifest next;
  for (auto& e : live.data_files)
    if (e.partition_key != partition_key) next.data_files.push_back(std::move(e));
  for (auto& d : live.delete_files)
    if (d.partition_key != partition_key) next.delete_files.push_back(std::move(d));
  VectorRowStream stream(survivors);
  std::vector<DataFileEntry> added = write_files(dir_, meta_, partition_key, stream,
                                                 kDefaultMaxRowsPerFile);
  next.data_files.insert(next.data_files.end(), added.begin(), added.end());
  return commit(std::move(next), Operation::kCompaction, added);
}

Snapshot TableStore::maintenance_noop(Operation op) {
  if (!is_maintenance(op) || op == Operation::kCompaction)
    throw ConfigError("maintenance_noop expects sort or purge");
  Manifest live = live_files(dir_, meta_, meta_.current_snapshot_id);
  return commit(std::move(live), op, {});
}

void TableStore::add_constraint(const ConstraintDef& def) {
  Constraint::parse(def, meta_.schema);  // reject before persisting
  for (const auto& existing : meta_.constraints)
    if (existing.constraint_id == def.constraint_id)
      throw ConfigError("constraint id already registered: " + def.constraint_id);
  CommitLock lock(dir_.lock_file());
  check_not_stale();
  meta_.constraints.push_back(def);
  save_table_json(dir_, meta_);
}

}  // namespace lakedq
