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

#include <doctest.h>

#include "lakedq/errors.hpp"
#include "lakedq/io_counter.hpp"
#include "lakedq/oracle.hpp"
#include "lakedq/rules.hpp"
#include "lakedq/workload.hpp"
#include "lakedq/write_path.hpp"
#include "test_util.hpp"

using namespace lakedq;

namespace {

Row make_row(int64_t id, double amount, const std::string& name, bool ok, int64_t ts) {
  return Row{Value{id}, Value{amount}, Value{name}, Value{ok}, Value{ts}};
}

TableStore open_fresh(const TableDir& dir, const testutil::ManualClock& clock) {
  init_table(dir, "t", testutil::five_kinds_schema(), {1, 2, 3, 4, 5});
  return TableStore(dir, "tester", clock.clock());
}

}  // namespace

TEST_CASE("a generated copy-on-write table validates clean") {
  testutil::TempDir tmp;
  TableGenSpec spec;
  spec.columns = 8;
  spec.rows = 4000;
  spec.files = 6;
  spec.partitions = 2;
  TableDir dir = generate_table(tmp / "g", 17, spec);
  TableMetadata meta = load_table(dir);

  ValidationReport rep = validate_snapshot(dir, meta, meta.current_snapshot_id);
  CHECK(rep.clean);
  CHECK(rep.data_file_opens ==
        live_files(dir, meta, meta.current_snapshot_id).data_files.size());
  REQUIRE(rep.theta_max_rel_error.has_value());
  CHECK(*rep.theta_max_rel_error < 0.03);
  for (const auto& e : rep.entries) CHECK_MESSAGE(e.match, e.field << " " << e.column_id);
}

TEST_CASE("serial and parallel oracle scans agree bit for bit") {
  testutil::TempDir tmp;
  TableGenSpec spec;
  spec.columns = 10;
  spec.rows = 3000;
  spec.files = 5;
  spec.partitions = 3;
  TableDir dir = generate_table(tmp / "g", 29, spec);
  TableMetadata meta = load_table(dir);

  OracleStats serial = oracle_stats(dir, meta, meta.current_snapshot_id, std::nullopt, false);
  OracleStats parallel = oracle_stats(dir, meta, meta.current_snapshot_id, std::nullopt, true);
  CHECK(serial.record_count == parallel.record_count);
  REQUIRE(serial.columns.size() == parallel.columns.size());
  for (size_t i = 0; i < serial.columns.size(); ++i) {
    const OracleColumn& a = serial.columns[i];
    const OracleColumn& b = parallel.columns[i];
    CHECK(a.column_id == b.column_id);
    CHECK(a.value_count == b.value_count);
    CHECK(a.null_count == b.null_count);
    CHECK(a.nan_count == b.nan_count);
    CHECK(a.column_size_bytes == b.column_size_bytes);
    CHECK(a.min_value == b.min_value);
    CHECK(a.max_value == b.max_value);
    CHECK(a.distinct == b.distinct);
    CHECK(a.zero_count == b.zero_count);
    CHECK(a.true_count == b.true_count);
    CHECK(a.sorted_values == b.sorted_values);
    std::optional<double> sa = a.sum(), sb = b.sum();
    REQUIRE(sa.has_value() == sb.has_value());
    if (sa) CHECK(std::memcmp(&*sa, &*sb, sizeof(double)) == 0);  // same fold, same bits
  }
}

TEST_CASE("the oracle applies positional deletes the manifest only promises") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  std::vector<Row> rows;
  for (int i = 0; i < 100; ++i)
    rows.push_back(make_row(i, i * 2.0, "n" + std::to_string(i % 5), i % 2, kGenEpoch + i));
  Snapshot s1 = store.append(WriteBatch{"p0", rows}, 40);
  Manifest live = live_files(dir, store.meta(), s1.snapshot_id);
  store.delete_rows("p0", {{live.data_files[0].file_path, 0},
                           {live.data_files[0].file_path, 39},
                           {live.data_files[2].file_path, 10}});

  OracleStats o = oracle_stats(dir, store.meta(), store.meta().current_snapshot_id);
  CHECK(o.record_count == 97);
  // rows 0, 39 and 90 are gone; min id becomes 1
  CHECK(o.column(1).min_value == Value{int64_t{1}});
  CHECK(o.column(1).value_count == 97);
  CHECK(*o.column(1).distinct == 97);

  // the manifest's base aggregates still describe 100 rows: only the
  // corrected record count is required to match under merge-on-read
  ValidationReport rep = validate_snapshot(dir, store.meta(), store.meta().current_snapshot_id);
  CHECK(!rep.clean);
  bool count_matched = false;
  for (const auto& e : rep.entries) {
    if (e.column_id == 0 && e.field == "record_count") {
      count_matched = true;
      CHECK(e.match);
      CHECK(e.oracle_value == "97");
    }
  }
  CHECK(count_matched);

  // compaction folds the deletes in; everything matches again
  store.compact("p0");
  ValidationReport after = validate_snapshot(dir, store.meta(), store.meta().current_snapshot_id);
  CHECK(after.clean);
}

TEST_CASE("oracle quantile and rank bracket duplicates exactly") {
  OracleColumn col;
  col.kind = ValueKind::kFloat64;
  col.sorted_values = {1, 2, 2, 2, 3, 4, 5, 5, 9, 10};
  CHECK(col.quantile(0.0) == 1.0);
  CHECK(col.quantile(1.0) == 10.0);
  CHECK(col.quantile(0.5) == 3.0);  // 5th of 10 values
  CHECK(col.rank(2.0) == 0.1);       // one value strictly below
  CHECK(col.rank_upper(2.0) == 0.4); // four values at or below
  CHECK(col.rank(1.0) == 0.0);
  CHECK(col.rank_upper(10.0) == 1.0);
  CHECK(col.rank(11.0) == 1.0);
}

TEST_CASE("oracle rule verdicts match the engine on decidable rules") {
  testutil::TempDir tmp;
  TableGenSpec spec;
  spec.columns = 10;
  spec.rows = 2000;
  spec.files = 4;
  spec.partitions = 2;  // two commits, so prev_snapshot comparisons resolve
  TableDir dir = generate_table(tmp / "g", 41, spec);
  TableMetadata meta = load_table(dir);
  TableSchema schema = meta.schema;

  EvalOptions opts;
  opts.now = kGenEpoch + 1000000;
  for (const std::string text :
       {"count > 1000", "count > 1000000", "notNull(code, < 50%)", "min(id) >= 0",
        "sum(amount) > 0", "mean(amount) > 0", "zeroCount(amount) >= 0", "trueCount(flag) > 0",
        "freshness(interval '48 hours')", "compare(count, prev_snapshot, 1000, abs)"}) {
    Rule rule = parse_rule(text, schema);
    rule.rule_id = "r";
    RuleResult engine = evaluate_rule(rule, dir, meta, meta.current_snapshot_id, opts);
    RuleResult oracle = oracle_rule(rule, dir, meta, meta.current_snapshot_id, opts);
    REQUIRE_MESSAGE(engine.verdict != Verdict::kIndeterminate, text);
    CHECK_MESSAGE(engine.verdict == oracle.verdict, text);
    CHECK(oracle.evaluated_from == "scan");
  }
}

TEST_CASE("expr rules count null-ridden rows as violations") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  std::vector<Row> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(make_row(i, 5.0, "n", true, kGenEpoch));
  rows[3][1] = Value{};   // null amount cannot satisfy amount >= 0
  rows[7][1] = Value{-1.0};
  store.append(WriteBatch{"p0", rows});

  Rule rule = parse_rule("expr(amount >= 0)", store.meta().schema);
  rule.rule_id = "r";
  RuleResult r = oracle_rule(rule, dir, store.meta(), store.meta().current_snapshot_id);
  CHECK(r.verdict == Verdict::kFail);
  CHECK(r.evaluated_from == "scan");
  CHECK(r.observed.find("2") != std::string::npos);
  CHECK(r.observed.find("10") != std::string::npos);

  Rule all_pass = parse_rule("expr(id >= 0)", store.meta().schema);
  all_pass.rule_id = "r2";
  CHECK(oracle_rule(all_pass, dir, store.meta(), store.meta().current_snapshot_id).verdict ==
        Verdict::kPass);
}

TEST_CASE("scan counts expose the asymmetry between the two paths") {
  testutil::TempDir tmp;
  TableGenSpec spec;
  spec.columns = 6;
  spec.rows = 1000;
  spec.files = 8;
  TableDir dir = generate_table(tmp / "g", 53, spec);
  TableMetadata meta = load_table(dir);

  Rule rule = parse_rule("count > 10", meta.schema);
  rule.rule_id = "r";
  uint64_t before = data_file_open_count();
  evaluate_rule(rule, dir, meta, meta.current_snapshot_id);
  CHECK(data_file_open_count() == before);  // metadata path: zero opens

  oracle_rule(rule, dir, meta, meta.current_snapshot_id);
  CHECK(data_file_open_count() == before + 8);  // oracle path: every file
}
