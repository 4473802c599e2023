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

#include <fstream>
#include <limits>

#include <doctest.h>

#include "lakedq/errors.hpp"
#include "lakedq/workload.hpp"
#include "lakedq/write_path.hpp"
#include "test_util.hpp"

using namespace lakedq;

namespace {

Row make_row(int64_t id, double amount, const std::string& name, bool ok, int64_t ts) {
  return Row{Value{id}, Value{amount}, Value{name}, Value{ok}, Value{ts}};
}

std::vector<Row> simple_rows(size_t n, int64_t ts_base = kGenEpoch) {
  std::vector<Row> rows;
  for (size_t i = 0; i < n; ++i)
    rows.push_back(make_row(static_cast<int64_t>(i), i * 1.5, "n" + std::to_string(i % 7),
                            i % 3 == 0, ts_base + static_cast<int64_t>(i)));
  return rows;
}

TableStore fresh_store(const std::filesystem::path& root, testutil::ManualClock& clock) {
  TableDir dir(root);
  init_table(dir, "t", testutil::five_kinds_schema(), {1, 2, 3, 4, 5});
  return TableStore(dir, "tester", clock.clock());
}

}  // namespace

TEST_CASE("append reads each row exactly once and chunks by max rows") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);

  std::vector<Row> rows = simple_rows(25);
  VectorRowStream stream(rows);
  Snapshot snap = store.append("p0", stream, 10);
  CHECK(stream.fetched() == 25);
  CHECK(snap.snapshot_id == 1);
  CHECK(snap.operation == Operation::kAppend);

  Manifest live = live_files(store.dir(), store.meta(), snap.snapshot_id);
  REQUIRE(live.data_files.size() == 3);
  CHECK(live.data_files[0].record_count == 10);
  CHECK(live.data_files[1].record_count == 10);
  CHECK(live.data_files[2].record_count == 5);
  CHECK(total_record_count(live.data_files) == 25);
  for (const auto& e : live.data_files) {
    CHECK(e.partition_key == "p0");
    CHECK(e.sketch_sidecar_path.has_value());
    CHECK(e.column_stats.size() == 5);
    CHECK(std::filesystem::exists(store.dir().resolve(e.file_path)));
    CHECK(std::filesystem::exists(store.dir().resolve(*e.sketch_sidecar_path)));
  }

  // data read back equals what went in
  std::vector<Row> readback;
  for (const auto& e : live.data_files) {
    auto part = read_data_rows(store.dir(), e.file_path, store.meta().schema);
    readback.insert(readback.end(), part.begin(), part.end());
  }
  CHECK(readback == rows);
}

TEST_CASE("bad rows are rejected before any metadata changes") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  store.append(WriteBatch{"p0", simple_rows(5)});
  uint64_t before = directory_hash((tmp / "t").string());

  WriteBatch arity{"p0", {Row{Value{int64_t{1}}, Value{1.0}}}};
  CHECK_THROWS_AS(store.append(arity), CorruptDataFileError);

  WriteBatch wrong_type{"p0", {make_row(1, 0.0, "x", true, 0)}};
  wrong_type.rows[0][1] = Value{std::string("not a double")};
  CHECK_THROWS_AS(store.append(wrong_type), TypeMismatchError);

  WriteBatch null_id{"p0", {make_row(1, 0.0, "x", true, 0)}};
  null_id.rows[0][0] = Value{};
  CHECK_THROWS_AS(store.append(null_id), NullInNonNullableError);

  WriteBatch inf_amount{"p0", {make_row(1, 0.0, "x", true, 0)}};
  inf_amount.rows[0][1] = Value{std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(store.append(inf_amount), NonFiniteValueError);

  // nullable columns accept null; NaN is allowed, only infinities are not
  WriteBatch fine{"p0", {make_row(1, 0.0, "x", true, 0)}};
  fine.rows[0][1] = Value{};
  fine.rows[0][2] = Value{};
  CHECK_NOTHROW(store.append(fine));

  CHECK(directory_hash((tmp / "t").string()) != before);  // the good commit landed
  CHECK(store.meta().current_snapshot_id == 2);           // rejected ones did not
}

TEST_CASE("a held lock turns away the second writer") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  {
    CommitLock lock(store.dir().lock_file());
    CHECK_THROWS_AS(store.append(WriteBatch{"p0", simple_rows(2)}), ConcurrentWriterError);
  }
  CHECK_NOTHROW(store.append(WriteBatch{"p0", simple_rows(2)}));
}

TEST_CASE("a stale handle cannot commit over a newer snapshot") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore a = fresh_store(tmp / "t", clock);
  TableStore b(TableDir(tmp / "t"), "other", clock.clock());
  a.append(WriteBatch{"p0", simple_rows(3)});
  CHECK_THROWS_AS(b.append(WriteBatch{"p1", simple_rows(3)}), StaleTableError);
}

TEST_CASE("violating commits leave the metadata directory untouched") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  store.add_constraint(ConstraintDef{"min_rows", "record_count > 1000", "whole-table"});
  uint64_t before = directory_hash((tmp / "t" / "metadata").string());

  try {
    store.append(WriteBatch{"p0", simple_rows(10)});
    FAIL("commit should have been rejected");
  } catch (const ConstraintViolationError& e) {
    CHECK(e.constraint_id == "min_rows");
    CHECK(e.observed == "10");
    CHECK(e.bound == "1000");
    CHECK(std::string(e.what()).find("min_rows") != std::string::npos);
    CHECK(std::string(e.what()).find("10") != std::string::npos);
    CHECK(std::string(e.what()).find("1000") != std::string::npos);
  }
  CHECK(directory_hash((tmp / "t" / "metadata").string()) == before);
  CHECK(load_table(store.dir()).current_snapshot_id == 0);
}

TEST_CASE("delta-scoped constraints skip deletes and maintenance") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  store.append(WriteBatch{"p0", simple_rows(100)});
  store.add_constraint(
      ConstraintDef{"null_amounts", "null_count(amount) / record_count < 0.05", "per-commit-delta"});

  // 10 nulls in 100 rows breaches the 5% ceiling
  std::vector<Row> bad = simple_rows(100);
  for (size_t i = 0; i < 10; ++i) bad[i][1] = Value{};
  CHECK_THROWS_AS(store.append(WriteBatch{"p0", bad}), ConstraintViolationError);

  // 4 nulls in 100 passes
  std::vector<Row> good = simple_rows(100);
  for (size_t i = 0; i < 4; ++i) good[i][1] = Value{};
  Snapshot ok = store.append(WriteBatch{"p0", good});

  // delete and compaction commits carry no arriving rows, so the delta
  // constraint cannot fire even though the live table still has nulls
  Manifest live = live_files(store.dir(), store.meta(), ok.snapshot_id);
  CHECK_NOTHROW(store.delete_rows("p0", {{live.data_files[0].file_path, 0}}));
  CHECK_NOTHROW(store.compact("p0"));
}

TEST_CASE("positional deletes correct counts without touching data") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  Snapshot s1 = store.append(WriteBatch{"p0", simple_rows(20)});
  Manifest live = live_files(store.dir(), store.meta(), s1.snapshot_id);
  std::string f0 = live.data_files[0].file_path;
  auto data_bytes = std::filesystem::file_size(store.dir().resolve(f0));

  Snapshot s2 = store.delete_rows("p0", {{f0, 3}, {f0, 5}, {f0, 7}});
  CHECK(s2.operation == Operation::kDelete);
  Manifest after = live_files(store.dir(), store.meta(), s2.snapshot_id);
  CHECK(total_record_count(after.data_files) == 20);
  CHECK(corrected_record_count(after) == 17);
  CHECK(after.delete_files.size() == 1);
  CHECK(std::filesystem::file_size(store.dir().resolve(f0)) == data_bytes);

  CHECK_THROWS_AS(store.delete_rows("p0", {{f0, 3}}), DuplicateDeleteError);
  CHECK_THROWS_AS(store.delete_rows("p0", {{f0, 20}}), PositionOutOfRangeError);
  CHECK_THROWS_AS(store.delete_rows("p0", {{"data/absent.csv", 0}}), PositionOutOfRangeError);
}

TEST_CASE("compaction folds deletes in and preserves the corrected count") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  std::vector<Row> rows = simple_rows(30);
  Snapshot s1 = store.append(WriteBatch{"p0", rows}, 10);
  Manifest live = live_files(store.dir(), store.meta(), s1.snapshot_id);
  store.delete_rows("p0", {{live.data_files[0].file_path, 0},
                           {live.data_files[0].file_path, 9},
                           {live.data_files[2].file_path, 4}});

  Snapshot s3 = store.compact("p0");
  CHECK(s3.operation == Operation::kCompaction);
  CHECK(s3.writer_identity == kMaintenanceWriter);
  Manifest after = live_files(store.dir(), store.meta(), s3.snapshot_id);
  CHECK(after.delete_files.empty());
  CHECK(total_record_count(after.data_files) == 27);
  CHECK(corrected_record_count(after) == 27);

  // surviving rows, in order, with the deleted positions gone
  std::vector<Row> expect;
  for (size_t i = 0; i < rows.size(); ++i)
    if (i != 0 && i != 9 && i != 24) expect.push_back(rows[i]);
  std::vector<Row> readback;
  for (const auto& e : after.data_files) {
    auto part = read_data_rows(store.dir(), e.file_path, store.meta().schema);
    readback.insert(readback.end(), part.begin(), part.end());
  }
  CHECK(readback == expect);
}

TEST_CASE("overwrite swaps a partition and discards its delete vectors") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  Snapshot s1 = store.append(WriteBatch{"p0", simple_rows(10)});
  store.append(WriteBatch{"p1", simple_rows(5)});
  Manifest live = live_files(store.dir(), store.meta(), s1.snapshot_id);
  store.delete_rows("p0", {{live.data_files[0].file_path, 1}});

  Snapshot s4 = store.overwrite(WriteBatch{"p0", simple_rows(3)});
  Manifest after = live_files(store.dir(), store.meta(), s4.snapshot_id);
  CHECK(after.delete_files.empty());
  CHECK(corrected_record_count(after) == 8);
  auto per = per_partition_corrected(after);
  CHECK(per["p0"] == 3);
  CHECK(per["p1"] == 5);
}

TEST_CASE("time travel sees each snapshot's live set") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  Snapshot s1 = store.append(WriteBatch{"p0", simple_rows(10)});
  Manifest m1 = live_files(store.dir(), store.meta(), s1.snapshot_id);
  Snapshot s2 = store.delete_rows("p0", {{m1.data_files[0].file_path, 0}});
  Snapshot s3 = store.overwrite(WriteBatch{"p0", simple_rows(4)});

  CHECK(corrected_record_count(live_files(store.dir(), store.meta(), s1.snapshot_id)) == 10);
  CHECK(corrected_record_count(live_files(store.dir(), store.meta(), s2.snapshot_id)) == 9);
  CHECK(corrected_record_count(live_files(store.dir(), store.meta(), s3.snapshot_id)) == 4);

  // partition filter narrows the view
  store.append(WriteBatch{"p1", simple_rows(6)});
  Manifest p1_only =
      live_files(store.dir(), store.meta(), store.meta().current_snapshot_id, std::string("p1"));
  CHECK(total_record_count(p1_only.data_files) == 6);
}

TEST_CASE("commit events record per-partition deltas") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  store.append(WriteBatch{"p0", simple_rows(10)});
  clock.advance(1000);
  Snapshot s1 = store.append(WriteBatch{"p1", simple_rows(5)});
  Manifest live = live_files(store.dir(), store.meta(), s1.snapshot_id);
  std::string p0_file;
  for (const auto& e : live.data_files)
    if (e.partition_key == "p0") p0_file = e.file_path;
  store.delete_rows("p0", {{p0_file, 2}});
  store.compact("p0");
  store.maintenance_noop(Operation::kSort);

  std::vector<CommitEvent> events = read_events(store.dir());
  REQUIRE(events.size() == 5);
  CHECK(events[0].partitions == std::vector<std::string>{"p0"});
  CHECK(events[0].partition_record_delta.at("p0") == 10);
  CHECK(events[1].partition_record_delta.at("p1") == 5);
  CHECK(events[2].operation == Operation::kDelete);
  CHECK(events[2].partition_record_delta.at("p0") == -1);
  CHECK(events[3].operation == Operation::kCompaction);
  CHECK(events[3].partition_record_delta.at("p0") == 0);  // corrected count is stable
  CHECK(events[4].operation == Operation::kSort);
  CHECK(events[4].partitions.empty());
  CHECK(events[4].writer_identity == kMaintenanceWriter);

  // commit timestamps never regress even if the clock does
  clock.set(kGenEpoch - 500);
  Snapshot late = store.append(WriteBatch{"p2", simple_rows(1)});
  CHECK(late.commit_ts >= events[4].commit_ts);
}

TEST_CASE("empty streams commit no files") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableStore store = fresh_store(tmp / "t", clock);
  std::vector<Row> none;
  VectorRowStream stream(none);
  Snapshot snap = store.append("p0", stream);
  Manifest live = live_files(store.dir(), store.meta(), snap.snapshot_id);
  CHECK(live.data_files.empty());
  CHECK(read_events(store.dir())[0].partitions.empty());
}
