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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lakedq/config.hpp"
#include "lakedq/table.hpp"

namespace lakedq {

// Health monitoring from commit metadata alone. Every number here comes from
// events, snapshots, manifests, and sketch sidecars; data files are never
// opened.

inline constexpr const char* kRollupPartition = "*";

enum class AlertKind : uint8_t {
  kRowCountAnomaly,
  kNullDrift,
  kRangeViolation,
  kArrivalDeviation,
  kFreshnessGap,
  kOverPartitioning,
};

const char* alert_kind_name(AlertKind k);

struct Alert {
  AlertKind kind = AlertKind::kRowCountAnomaly;
  std::string partition;  // kRollupPartition for table-level alerts
  std::optional<uint32_t> column_id;
  uint64_t snapshot_id = 0;  // 0 for clock-driven alerts
  int64_t at_ts = 0;         // commit ts, or the sweep clock
  double observed = 0.0;
  double threshold = 0.0;
  std::string detail;

  bool operator==(const Alert&) const = default;
};

// One observation on a series. Column series points carry the aggregate of
// the files the commit added (arriving data), not the cumulative table
// state; a spike diluted into a year of history is invisible, the same spike
// in the day's delivery is not.
struct SeriesPoint {
  std::string partition;
  std::optional<uint32_t> column_id;  // absent: arrival series
  uint64_t snapshot_id = 0;
  int64_t commit_ts = 0;
  bool maintenance = false;   // stored for display, skipped by detectors
  bool out_of_order = false;  // arrived after a later-stamped commit
  bool not_ready = false;     // partition rewritten within the readiness window
  std::map<std::string, double> metrics;

  bool operator==(const SeriesPoint&) const = default;
};

nlohmann::json alert_to_json(const Alert& a, const TableSchema& schema);
nlohmann::json series_point_to_json(const SeriesPoint& p, const TableSchema& schema);

// Median of |x - median(xs)| scaled to sigma, with the epsilon keeping the
// ratio finite on constant histories: (x - med) / (1.4826 * MAD + eps).
double robust_z(const std::vector<double>& history, double x, double epsilon);

struct SeriesKey {
  std::string partition;
  std::optional<uint32_t> column_id;

  auto operator<=>(const SeriesKey&) const = default;
};

class Observer {
 public:
  Observer(TableDir dir, DetectorConfig cfg = {});

  // Replays events.jsonl from the start, building series and running the
  // event-driven detectors on each new point. Deterministic: same table,
  // same alerts, same order.
  std::vector<Alert> replay();

  // Clock-driven pass: freshness needs no new event to fire. Monotone in
  // now; once stale, later sweeps stay stale.
  std::vector<Alert> sweep(int64_t now_micros) const;

  const std::map<SeriesKey, std::vector<SeriesPoint>>& series() const { return series_; }
  const TableMetadata& metadata() const { return meta_; }

  // Detector invocations skipped for lack of history.
  size_t skipped_checks() const { return skipped_checks_; }

 private:
  std::vector<SeriesPoint*> ingest(const CommitEvent& ev);
  void detect(const SeriesPoint& point, std::vector<Alert>& out);
  SeriesPoint* insert_point(SeriesPoint p);

  TableDir dir_;
  DetectorConfig cfg_;
  TableMetadata meta_;
  std::map<SeriesKey, std::vector<SeriesPoint>> series_;
  // (commit_ts, partition) of non-maintenance arrivals and (commit_ts,
  // file_size) of their added files, for the partitions-per-day scan.
  std::vector<std::pair<int64_t, std::string>> arrivals_;
  std::vector<std::pair<int64_t, uint64_t>> added_sizes_;
  std::map<std::string, int64_t> last_write_ts_;
  size_t skipped_checks_ = 0;
};

}  // namespace lakedq
