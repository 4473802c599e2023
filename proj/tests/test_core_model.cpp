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

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include <doctest.h>

#include "lakedq/manifest.hpp"
#include "lakedq/schema.hpp"
#include "lakedq/stats.hpp"
#include "lakedq/table.hpp"
#include "test_util.hpp"

using namespace lakedq;

TEST_CASE("schema rejects duplicate ids and names, lookups throw") {
  CHECK_THROWS_AS(TableSchema({ColumnSchema{1, "a", ValueKind::kInt64, false},
                               ColumnSchema{1, "b", ValueKind::kInt64, false}}),
                  ConfigError);
  CHECK_THROWS_AS(TableSchema({ColumnSchema{1, "a", ValueKind::kInt64, false},
                               ColumnSchema{2, "a", ValueKind::kInt64, false}}),
                  ConfigError);
  TableSchema s = testutil::five_kinds_schema();
  CHECK(s.by_name("amount").column_id == 2);
  CHECK(s.by_id(4).name == "ok");
  CHECK_THROWS_AS(s.by_name("missing"), UnknownColumnError);
  CHECK_THROWS_AS(s.by_id(99), UnknownColumnError);
  CHECK(s.find_id(99) == nullptr);
}

TEST_CASE("schema json round trip") {
  TableSchema s = testutil::five_kinds_schema();
  TableSchema back = TableSchema::from_json(s.to_json());
  REQUIRE(back.size() == s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    CHECK(back.column_at(i).column_id == s.column_at(i).column_id);
    CHECK(back.column_at(i).name == s.column_at(i).name);
    CHECK(back.column_at(i).kind == s.column_at(i).kind);
    CHECK(back.column_at(i).nullable == s.column_at(i).nullable);
  }
}

TEST_CASE("accumulator hand example: ints 1..9 plus null") {
  StatsAccumulator acc(1, ValueKind::kInt64);
  for (int64_t v = 1; v <= 9; ++v) acc.update(Value{v}, 1);
  acc.update(Value{}, 0);
  ColumnStats s = acc.finish();
  CHECK(s.value_count == 10);  // nulls are rows too
  CHECK(s.null_count == 1);
  CHECK(*s.lower_bound == Value{int64_t{1}});
  CHECK(*s.upper_bound == Value{int64_t{9}});
  CHECK(*s.sum == 45.0);
  CHECK(*s.zero_count == 0);
  CHECK(s.column_size_bytes == 9);
}

TEST_CASE("accumulator bool example") {
  StatsAccumulator acc(1, ValueKind::kBool);
  acc.update(Value{true}, 4);
  acc.update(Value{true}, 4);
  acc.update(Value{false}, 5);
  acc.update(Value{}, 0);
  ColumnStats s = acc.finish();
  CHECK(*s.true_count == 2);
  CHECK(s.null_count == 1);
  CHECK(!s.sum.has_value());
  CHECK(!s.zero_count.has_value());
}

TEST_CASE("NaN feeds nan_count only, never bounds or sum") {
  StatsAccumulator acc(1, ValueKind::kFloat64);
  acc.update(Value{1.0}, 1);
  acc.update(Value{std::numeric_limits<double>::quiet_NaN()}, 3);
  acc.update(Value{-2.0}, 2);
  acc.update(Value{0.0}, 1);
  ColumnStats s = acc.finish();
  CHECK(s.nan_count == 1);
  CHECK(*s.lower_bound == Value{-2.0});
  CHECK(*s.upper_bound == Value{1.0});
  CHECK(*s.sum == -1.0);
  CHECK(*s.zero_count == 1);
  CHECK(s.column_size_bytes == 7);  // NaN still occupies encoded bytes
}

TEST_CASE("numeric columns always carry sum and zero_count, even empty") {
  StatsAccumulator acc(1, ValueKind::kFloat64);
  ColumnStats s = acc.finish();
  CHECK(s.sum.has_value());
  CHECK(*s.sum == 0.0);
  CHECK(*s.zero_count == 0);
  // timestamps are ordered but not summable
  StatsAccumulator ts(2, ValueKind::kTimestampMicros);
  ts.update(Value{int64_t{5}}, 1);
  ColumnStats t = ts.finish();
  CHECK(!t.sum.has_value());
  CHECK(!t.zero_count.has_value());
}

TEST_CASE("string bounds truncate to a 16-byte prefix") {
  std::string long_low(30, 'a');
  std::string long_high = std::string(16, 'z') + "tail";
  StatsAccumulator acc(1, ValueKind::kString);
  acc.update(Value{long_low}, 30);
  acc.update(Value{long_high}, 20);
  ColumnStats s = acc.finish();
  CHECK(std::get<std::string>(*s.lower_bound) == std::string(16, 'a'));
  std::string upper = std::get<std::string>(*s.upper_bound);
  CHECK(upper.size() == 16);
  CHECK(upper == std::string(15, 'z') + "{");  // 'z' + 1
  CHECK(std::string(16, 'z') + "tail" <= upper);
}

TEST_CASE("upper bound overflows away on a 0xFF prefix") {
  std::string ff(16, '\xFF');
  CHECK(!truncated_upper_bound(ff + "more").has_value());
  CHECK(truncated_lower_bound(ff + "more") == ff);
  CHECK(truncated_lower_bound("short") == "short");
  CHECK(*truncated_upper_bound("short") == "short");
}

TEST_CASE("aggregation is independent of file grouping, sums bit for bit") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    size_t n_files = 2 + rng() % 6;
    std::vector<ColumnStats> per_file;
    std::vector<std::string> paths;
    for (size_t f = 0; f < n_files; ++f) {
      StatsAccumulator acc(1, ValueKind::kFloat64);
      size_t rows = rng() % 40;
      for (size_t r = 0; r < rows; ++r) {
        if (rng() % 10 == 0) {
          acc.update(Value{}, 0);
        } else {
          acc.update(Value{(static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 1e6}, 8);
        }
      }
      per_file.push_back(acc.finish());
      paths.push_back("data/f" + std::to_string(trial) + "-" + std::to_string(f) + ".csv");
    }

    AggregatedColumnStats direct;
    direct.column_id = 1;
    for (size_t f = 0; f < n_files; ++f) aggregate_add(direct, paths[f], 0, per_file[f]);

    size_t cut = 1 + rng() % (n_files - 1);
    AggregatedColumnStats left, right;
    left.column_id = right.column_id = 1;
    for (size_t f = 0; f < cut; ++f) aggregate_add(left, paths[f], 0, per_file[f]);
    for (size_t f = cut; f < n_files; ++f) aggregate_add(right, paths[f], 0, per_file[f]);
    aggregate_combine(left, right);

    CHECK(left.value_count == direct.value_count);
    CHECK(left.null_count == direct.null_count);
    CHECK(left.lower_bound == direct.lower_bound);
    CHECK(left.upper_bound == direct.upper_bound);
    std::optional<double> a = left.sum(), b = direct.sum();
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      // bitwise, not approximate: the fold order is a function of paths alone
      CHECK(std::memcmp(&*a, &*b, sizeof(double)) == 0);
    }
  }
}

TEST_CASE("stats invariants catch broken blocks") {
  ColumnStats s;
  s.column_id = 1;
  s.value_count = 1;
  s.null_count = 2;  // more nulls than rows
  CHECK_THROWS_AS(check_stats_invariants(s, ValueKind::kInt64), CorruptDataFileError);
}

TEST_CASE("manifest json round trip including awkward bounds") {
  Manifest m;
  DataFileEntry e;
  e.file_path = "data/f0.csv";
  e.partition_key = "p0";
  e.record_count = 3;
  e.file_size_bytes = 77;
  ColumnStats s;
  s.column_id = 1;
  s.value_count = 3;
  s.lower_bound = Value{std::string("\xFF\xFE binary", 9)};  // not valid UTF-8
  s.upper_bound = Value{std::string("plain")};
  e.column_stats.push_back(s);
  ColumnStats f;
  f.column_id = 2;
  f.value_count = 3;
  f.lower_bound = Value{-0.0};
  f.upper_bound = Value{1.5};
  f.sum = 1.5;
  f.zero_count = 1;
  e.column_stats.push_back(f);
  m.data_files.push_back(e);

  DeleteFileEntry d;
  d.file_path = "deletes/f1.jsonl";
  d.partition_key = "p0";
  d.delete_count = 2;
  d.targets.push_back(DeleteTarget{"data/f0.csv", {0, 2}});
  m.delete_files.push_back(d);

  testutil::TempDir tmp;
  auto path = tmp / "manifest.jsonl";
  write_manifest(path, m);
  Manifest back = read_manifest(path);
  CHECK(back == m);
  // -0.0 must survive with its sign
  CHECK(std::signbit(std::get<double>(*back.data_files[0].column_stats[1].lower_bound)));
}

TEST_CASE("corrected counts subtract positional deletes per partition") {
  Manifest m;
  DataFileEntry a;
  a.file_path = "data/f0.csv";
  a.partition_key = "p0";
  a.record_count = 100;
  DataFileEntry b;
  b.file_path = "data/f1.csv";
  b.partition_key = "p1";
  b.record_count = 50;
  m.data_files = {a, b};
  DeleteFileEntry d;
  d.file_path = "deletes/f2.jsonl";
  d.partition_key = "p0";
  d.delete_count = 7;
  d.targets.push_back(DeleteTarget{"data/f0.csv", {1, 2, 3, 4, 5, 6, 7}});
  m.delete_files = {d};

  CHECK(corrected_record_count(m) == 143);
  auto per = per_partition_corrected(m);
  CHECK(per["p0"] == 93);
  CHECK(per["p1"] == 50);
  auto dropped = deleted_positions(m);
  CHECK(dropped["data/f0.csv"].size() == 7);
}

TEST_CASE("snapshot and commit event json round trips") {
  Snapshot s;
  s.snapshot_id = 4;
  s.parent_id = 3;
  s.commit_ts = 1767225600000000;
  s.writer_identity = "job-a";
  s.operation = Operation::kOverwrite;
  s.manifest_path = "metadata/manifest-4.jsonl";
  s.summary = {{"records", "10"}};
  CHECK(snapshot_from_json(snapshot_to_json(s)) == s);

  CommitEvent e;
  e.snapshot_id = 4;
  e.commit_ts = s.commit_ts;
  e.writer_identity = "job-a";
  e.operation = Operation::kDelete;
  e.partitions = {"p0"};
  e.partition_record_delta = {{"p0", -5}};
  CHECK(event_from_json(event_to_json(e)) == e);
}

TEST_CASE("init and load a table; snapshot log replays") {
  testutil::TempDir tmp;
  TableDir dir(tmp / "t");
  init_table(dir, "t", testutil::five_kinds_schema(), {1, 2});
  TableMetadata meta = load_table(dir);
  CHECK(meta.table_name == "t");
  CHECK(meta.current_snapshot_id == 0);
  CHECK(meta.current() == nullptr);
  CHECK(meta.stats_priority == std::vector<uint32_t>{1, 2});
  CHECK_THROWS_AS(meta.snapshot(1), UnknownSnapshotError);

  // unknown priority column rejected at init
  TableDir dir2(tmp / "t2");
  CHECK_THROWS_AS(init_table(dir2, "t2", testutil::five_kinds_schema(), {99}),
                  UnknownColumnError);
}

TEST_CASE("operation names round trip and maintenance is exactly three kinds") {
  for (Operation op : {Operation::kAppend, Operation::kOverwrite, Operation::kDelete,
                       Operation::kCompaction, Operation::kSort, Operation::kPurge}) {
    CHECK(operation_from_name(operation_name(op)) == op);
  }
  CHECK(!is_maintenance(Operation::kAppend));
  CHECK(!is_maintenance(Operation::kOverwrite));
  CHECK(!is_maintenance(Operation::kDelete));
  CHECK(is_maintenance(Operation::kCompaction));
  CHECK(is_maintenance(Operation::kSort));
  CHECK(is_maintenance(Operation::kPurge));
  CHECK(!operation_from_name("rename").has_value());
}
