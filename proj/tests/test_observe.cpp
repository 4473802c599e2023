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

#include <algorithm>
#include <cmath>
#include <fstream>

#include <doctest.h>

#include "lakedq/errors.hpp"
#include "lakedq/io_counter.hpp"
#include "lakedq/observe.hpp"
#include "lakedq/workload.hpp"
#include "lakedq/write_path.hpp"
#include "test_util.hpp"

using namespace lakedq;

namespace {

constexpr int64_t kHour = 3600ll * 1000000;

Row make_row(int64_t id, double amount, const std::string& name, bool ok, int64_t ts) {
  return Row{Value{id}, Value{amount}, Value{name}, Value{ok}, Value{ts}};
}

std::vector<Row> batch_rows(size_t n, size_t nulls, int64_t ts) {
  std::vector<Row> rows;
  for (size_t i = 0; i < n; ++i) {
    Row r = make_row(static_cast<int64_t>(i), 1.0 + i, "n", true, ts + static_cast<int64_t>(i));
    if (i < nulls) r[1] = Value{};
    rows.push_back(r);
  }
  return rows;
}

TableStore open_fresh(const TableDir& dir, const testutil::ManualClock& clock) {
  init_table(dir, "t", testutil::five_kinds_schema(), {1, 2, 3, 4, 5});
  return TableStore(dir, "tester", clock.clock());
}

std::vector<Alert> alerts_of_kind(const std::vector<Alert>& alerts, AlertKind kind) {
  std::vector<Alert> out;
  for (const auto& a : alerts)
    if (a.kind == kind) out.push_back(a);
  return out;
}

}  // namespace

TEST_CASE("robust z matches the hand formula") {
  std::vector<double> hist = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  // median 5, MAD 2 -> sigma 2.9652
  CHECK(robust_z(hist, 11.0, 1e-9) == doctest::Approx((11.0 - 5.0) / (1.4826 * 2.0 + 1e-9)));
  CHECK(robust_z(hist, 5.0, 1e-9) == 0.0);

  std::vector<double> flat(10, 7.0);
  CHECK(robust_z(flat, 7.0, 1e-9) == 0.0);            // on the median: quiet
  CHECK(std::fabs(robust_z(flat, 7.5, 1e-9)) > 1e6);  // off a constant history: loud
}

TEST_CASE("steady ingestion raises nothing, a dropped delivery raises row count") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  for (int day = 0; day < 14; ++day) {
    clock.set(kGenEpoch + day * 24 * kHour);
    store.append(WriteBatch{"d" + std::to_string(day), batch_rows(1000, 10, *clock.now)});
  }

  Observer quiet(dir);
  CHECK(quiet.replay().empty());

  clock.set(kGenEpoch + 14 * 24 * kHour);
  Snapshot bad = store.append(WriteBatch{"d14", batch_rows(700, 7, *clock.now)});

  Observer obs(dir);
  std::vector<Alert> alerts = obs.replay();
  auto drops = alerts_of_kind(alerts, AlertKind::kRowCountAnomaly);
  REQUIRE(!drops.empty());
  CHECK(drops[0].snapshot_id == bad.snapshot_id);
  CHECK(drops[0].observed < -3.0);  // strongly negative z
  CHECK(std::fabs(drops[0].observed) > drops[0].threshold);

  // determinism: a second replay sees exactly the same alerts
  Observer again(dir);
  CHECK(again.replay() == alerts);
}

TEST_CASE("null drift fires on the first elevated commit and not before") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  std::vector<uint64_t> snaps;
  for (int i = 0; i < 12; ++i) {
    clock.set(kGenEpoch + i * kHour);
    size_t nulls = i < 10 ? 10 : 80 + (i - 10) * 70ull;
    snaps.push_back(store.append(WriteBatch{"p0", batch_rows(1000, nulls, *clock.now)}).snapshot_id);
  }

  Observer obs(dir);
  auto drifts = alerts_of_kind(obs.replay(), AlertKind::kNullDrift);
  REQUIRE(!drifts.empty());
  CHECK(drifts[0].snapshot_id == snaps[10]);  // the 0.08 commit, not the 0.01 ones
  CHECK(drifts[0].column_id == uint32_t{2});
  CHECK(drifts[0].partition == "p0");
}

TEST_CASE("maintenance commits shift no detector and stay flagged in the series") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");

  auto run = [&](bool with_maintenance) {
    std::filesystem::remove_all(tmp / "t");
    TableStore store = open_fresh(dir, clock);
    for (int i = 0; i < 14; ++i) {
      clock.set(kGenEpoch + i * 2 * kHour);
      store.append(WriteBatch{"p0", batch_rows(i == 13 ? 400 : 1000, 5, *clock.now)});
      if (with_maintenance && i % 3 == 0) {
        clock.advance(kHour / 2);
        store.compact("p0");
        store.maintenance_noop(Operation::kSort);
      }
    }
    Observer obs(dir);
    std::vector<Alert> alerts = obs.replay();
    std::vector<std::tuple<AlertKind, std::string, int64_t>> shape;
    for (const auto& a : alerts) shape.emplace_back(a.kind, a.partition, a.at_ts);
    if (with_maintenance) {
      for (const auto& [key, points] : obs.series()) {
        (void)key;
        for (const auto& p : points)
          if (p.maintenance) CHECK(p.metrics.count("record_count"));
      }
      bool saw_maintenance_point = false;
      for (const auto& [key, points] : obs.series())
        for (const auto& p : points) saw_maintenance_point |= p.maintenance;
      CHECK(saw_maintenance_point);
      for (const auto& a : alerts) {
        const Snapshot& s = obs.metadata().snapshot(a.snapshot_id);
        CHECK(!is_maintenance(s.operation));
      }
    }
    return shape;
  };

  auto plain = run(false);
  auto noisy = run(true);
  CHECK(plain == noisy);
  CHECK(!plain.empty());  // the 400-row commit must fire either way
}

TEST_CASE("arrival deviation needs a widened gap, freshness needs silence") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  for (int i = 0; i < 10; ++i) {
    clock.set(kGenEpoch + i * kHour);
    store.append(WriteBatch{"p0", batch_rows(100, 1, *clock.now)});
  }
  Observer steady(dir);
  CHECK(alerts_of_kind(steady.replay(), AlertKind::kArrivalDeviation).empty());

  // five hours of nothing, then a commit: inter-arrival gap 5x the median
  clock.set(kGenEpoch + 14 * kHour);
  Snapshot late = store.append(WriteBatch{"p0", batch_rows(100, 1, *clock.now)});
  Observer obs(dir);
  auto devs = alerts_of_kind(obs.replay(), AlertKind::kArrivalDeviation);
  REQUIRE(!devs.empty());
  CHECK(devs[0].snapshot_id == late.snapshot_id);
  CHECK(devs[0].observed == doctest::Approx(5.0 * kHour / 1e6));
  CHECK(devs[0].threshold == doctest::Approx(2.0 * kHour / 1e6));

  // freshness: quiet at the last commit, stale after enough silence, and
  // monotone from there on
  CHECK(obs.sweep(kGenEpoch + 14 * kHour).empty());
  auto gaps = alerts_of_kind(obs.sweep(kGenEpoch + 600 * kHour), AlertKind::kFreshnessGap);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0].snapshot_id == 0);
  CHECK(gaps[0].at_ts == kGenEpoch + 600 * kHour);
  CHECK(!obs.sweep(kGenEpoch + 900 * kHour).empty());
}

TEST_CASE("range breaches fire from the latest point without history") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);

  DetectorConfig cfg;
  cfg.ranges["amount"] = StaticRange{0.0, 100.0};
  clock.set(kGenEpoch);
  store.append(WriteBatch{"p0", batch_rows(10, 0, kGenEpoch)});
  Observer ok(dir, cfg);
  CHECK(alerts_of_kind(ok.replay(), AlertKind::kRangeViolation).empty());

  std::vector<Row> bad = batch_rows(10, 0, kGenEpoch);
  bad[3][1] = Value{-4.5};
  clock.advance(kHour);
  Snapshot snap = store.append(WriteBatch{"p0", bad});
  Observer obs(dir, cfg);
  auto breaches = alerts_of_kind(obs.replay(), AlertKind::kRangeViolation);
  REQUIRE(breaches.size() == 1);
  CHECK(breaches[0].snapshot_id == snap.snapshot_id);
  CHECK(breaches[0].column_id == uint32_t{2});
  CHECK(breaches[0].observed == -4.5);
  CHECK(breaches[0].threshold == 0.0);
}

TEST_CASE("over-partitioning pairs partition churn with small files") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  // six fresh partitions inside one day, a handful of rows each
  for (int i = 0; i < 6; ++i) {
    clock.set(kGenEpoch + i * kHour);
    store.append(WriteBatch{"part" + std::to_string(i), batch_rows(5, 0, *clock.now)});
  }
  DetectorConfig cfg;
  cfg.partitions_per_day = 3;
  cfg.min_history = 1;
  Observer obs(dir, cfg);
  auto alerts = alerts_of_kind(obs.replay(), AlertKind::kOverPartitioning);
  CHECK(!alerts.empty());
  CHECK(alerts[0].partition == kRollupPartition);

  DetectorConfig off = cfg;
  off.partitions_per_day = 0;
  Observer silent(dir, off);
  CHECK(alerts_of_kind(silent.replay(), AlertKind::kOverPartitioning).empty());
}

TEST_CASE("rewrites inside the readiness window are flagged not ready") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  clock.set(kGenEpoch);
  store.append(WriteBatch{"p0", batch_rows(10, 0, kGenEpoch)});
  clock.advance(10 * 60 * 1000000ll);  // ten minutes later, same partition
  store.append(WriteBatch{"p0", batch_rows(10, 0, kGenEpoch)});
  clock.advance(2 * kHour);  // well clear of the window
  store.append(WriteBatch{"p0", batch_rows(10, 0, kGenEpoch)});

  Observer obs(dir);
  obs.replay();
  SeriesKey key{"p0", std::nullopt};
  const auto& points = obs.series().at(key);
  REQUIRE(points.size() == 3);
  CHECK(!points[0].not_ready);
  CHECK(points[1].not_ready);
  CHECK(!points[2].not_ready);
}

TEST_CASE("late-stamped events are resorted and flagged") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  for (int i = 0; i < 4; ++i) {
    clock.set(kGenEpoch + i * kHour);
    store.append(WriteBatch{"p0", batch_rows(10, 0, *clock.now)});
  }

  // swap the last two event lines so the replay sees timestamps regress
  std::ifstream in(dir.events_log());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  REQUIRE(lines.size() == 4);
  std::swap(lines[2], lines[3]);
  std::ofstream out(dir.events_log(), std::ios::trunc);
  for (const auto& l : lines) out << l << "\n";
  out.close();

  Observer obs(dir);
  obs.replay();
  const auto& points = obs.series().at(SeriesKey{"p0", std::nullopt});
  REQUIRE(points.size() == 4);
  // stored in timestamp order regardless of arrival order
  CHECK(std::is_sorted(points.begin(), points.end(),
                       [](const SeriesPoint& a, const SeriesPoint& b) {
                         return a.commit_ts < b.commit_ts;
                       }));
  size_t flagged = 0;
  for (const auto& p : points) flagged += p.out_of_order;
  CHECK(flagged == 1);
  CHECK(!points[3].out_of_order);  // the later-stamped one was already in place
  CHECK(points[2].out_of_order);
}

TEST_CASE("observation never opens data files") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  for (int i = 0; i < 10; ++i) {
    clock.set(kGenEpoch + i * kHour);
    store.append(WriteBatch{"p" + std::to_string(i % 2), batch_rows(50, 2, *clock.now)});
  }
  store.compact("p0");

  uint64_t before = data_file_open_count();
  Observer obs(dir);
  obs.replay();
  obs.sweep(kGenEpoch + 100 * kHour);
  CHECK(data_file_open_count() == before);
}

TEST_CASE("disabled detectors silence every scenario") {
  testutil::TempDir tmp;
  IncidentFixture fx = replay_incident(tmp.path(), "freshness_gap");
  Observer obs(TableDir(fx.table_root), disabled_detectors());
  CHECK(obs.replay().empty());
  CHECK(obs.sweep(fx.sweep_now).empty());
}

TEST_CASE("short histories are counted as skipped checks") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  for (int i = 0; i < 3; ++i) {
    clock.set(kGenEpoch + i * kHour);
    store.append(WriteBatch{"p0", batch_rows(10, 0, *clock.now)});
  }
  Observer obs(dir);
  CHECK(obs.replay().empty());
  CHECK(obs.skipped_checks() > 0);
}

TEST_CASE("alerts and points serialize with column names") {
  testutil::TempDir tmp;
  testutil::ManualClock clock;
  TableDir dir(tmp / "t");
  TableStore store = open_fresh(dir, clock);
  clock.set(kGenEpoch);
  store.append(WriteBatch{"p0", batch_rows(10, 1, kGenEpoch)});
  Observer obs(dir);
  obs.replay();

  Alert a;
  a.kind = AlertKind::kNullDrift;
  a.partition = "p0";
  a.column_id = 2;
  a.snapshot_id = 1;
  a.at_ts = kGenEpoch;
  a.observed = 4.5;
  a.threshold = 3.0;
  a.detail = "why";
  nlohmann::json aj = alert_to_json(a, obs.metadata().schema);
  CHECK(aj.at("kind") == "NULL_DRIFT");
  CHECK(aj.at("column") == "amount");
  CHECK(aj.at("partition") == "p0");

  const auto& points = obs.series().at(SeriesKey{"p0", uint32_t{2}});
  REQUIRE(points.size() == 1);
  CHECK(points[0].metrics.at("null_fraction") == doctest::Approx(0.1));
  CHECK(points[0].metrics.at("record_count") == 10.0);
  nlohmann::json pj = series_point_to_json(points[0], obs.metadata().schema);
  CHECK(pj.at("column") == "amount");
  CHECK(pj.at("metrics").at("null_fraction") == doctest::Approx(0.1));

  const auto& arrivals = obs.series().at(SeriesKey{"p0", std::nullopt});
  CHECK(arrivals[0].metrics.at("record_count") == 10.0);
  nlohmann::json arj = series_point_to_json(arrivals[0], obs.metadata().schema);
  CHECK(!arj.contains("column"));
}
