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

#include "lakedq/observe.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "lakedq/errors.hpp"
#include "lakedq/io_counter.hpp"
#include "lakedq/sketch_merge.hpp"
#include "lakedq/value.hpp"

namespace lakedq {

namespace {

constexpr int64_t kDayMicros = 86400LL * 1000000;

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

const char* alert_kind_name(AlertKind k) {
  switch (k) {
    case AlertKind::kRowCountAnomaly: return "ROW_COUNT_ANOMALY";
    case AlertKind::kNullDrift: return "NULL_DRIFT";
    case AlertKind::kRangeViolation: return "RANGE_VIOLATION";
    case AlertKind::kArrivalDeviation: return "ARRIVAL_DEVIATION";
    case AlertKind::kFreshnessGap: return "FRESHNESS_GAP";
    case AlertKind::kOverPartitioning: return "OVER_PARTITIONING";
  }
  return "?";
}

double robust_z(const std::vector<double>& history, double x, double epsilon) {
  double med = median_of(history);
  std::vector<double> dev;
  dev.reserve(history.size());
  for (double h : history) dev.push_back(std::fabs(h - med));
  double mad = median_of(std::move(dev));
  return (x - med) / (1.4826 * mad + epsilon);
}

nlohmann::json alert_to_json(const Alert& a, const TableSchema& schema) {
  nlohmann::json j;
  j["kind"] = alert_kind_name(a.kind);
  j["partition"] = a.partition;
  if (a.column_id) {
    const ColumnSchema* col = schema.find_id(*a.column_id);
    j["column"] = col != nullptr ? col->name : std::to_string(*a.column_id);
  }
  j["snapshot"] = a.snapshot_id;
  j["ts"] = a.at_ts;
  j["observed"] = a.observed;
  j["threshold"] = a.threshold;
  j["detail"] = a.detail;
  return j;
}

nlohmann::json series_point_to_json(const SeriesPoint& p, const TableSchema& schema) {
  nlohmann::json j;
  j["partition"] = p.partition;
  if (p.column_id) {
    const ColumnSchema* col = schema.find_id(*p.column_id);
    j["column"] = col != nullptr ? col->name : std::to_string(*p.column_id);
  }
  j["snapshot"] = p.snapshot_id;
  j["ts"] = p.commit_ts;
  j["maintenance"] = p.maintenance;
  j["out_of_order"] = p.out_of_order;
  j["not_ready"] = p.not_ready;
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [name, value] : p.metrics) m[name] = value;
  j["metrics"] = m;
  return j;
}

Observer::Observer(TableDir dir, DetectorConfig cfg)
    : dir_(std::move(dir)), cfg_(std::move(cfg)), meta_(load_table(dir_)) {}

SeriesPoint* Observer::insert_point(SeriesPoint p) {
  auto& vec = series_[SeriesKey{p.partition, p.column_id}];
  if (vec.empty() || vec.back().commit_ts <= p.commit_ts) {
    vec.push_back(std::move(p));
    return &vec.back();
  }
  // Late event: keep the series sorted by commit time and mark the point.
  p.out_of_order = true;
  auto pos = std::upper_bound(
      vec.begin(), vec.end(), p.commit_ts,
      [](int64_t ts, const SeriesPoint& q) { return ts < q.commit_ts; });
  pos = vec.insert(pos, std::move(p));
  return &*pos;
}

std::vector<SeriesPoint*> Observer::ingest(const CommitEvent& ev) {
  std::vector<SeriesPoint*> out;
  const Snapshot& snap = meta_.snapshot(ev.snapshot_id);
  bool maintenance =
      is_maintenance(ev.operation) || ev.writer_identity == kMaintenanceWriter;

  // Late relative to the partition's previous write: downstream reads taken
  // between the two writes saw a hole, so the fresh point is flagged until
  // the readiness window passes.
  std::set<std::string> not_ready;
  if (!maintenance) {
    for (const auto& p : ev.partitions) {
      auto it = last_write_ts_.find(p);
      if (it != last_write_ts_.end() &&
          ev.commit_ts - it->second < cfg_.readiness_window_micros) {
        not_ready.insert(p);
      }
    }
  }

  if (!maintenance) {
    int64_t total_delta = 0;
    for (const auto& [p, d] : ev.partition_record_delta) total_delta += d;

    for (const auto& p : ev.partitions) {
      SeriesPoint pt;
      pt.partition = p;
      pt.snapshot_id = ev.snapshot_id;
      pt.commit_ts = ev.commit_ts;
      pt.not_ready = not_ready.count(p) > 0;
      auto it = ev.partition_record_delta.find(p);
      pt.metrics["record_count"] = it != ev.partition_record_delta.end()
                                       ? static_cast<double>(it->second)
                                       : 0.0;
      out.push_back(insert_point(std::move(pt)));
      arrivals_.emplace_back(ev.commit_ts, p);
    }

    // Table rollup: one point per user commit, so cadence is visible even
    // when every commit lands in a fresh partition.
    SeriesPoint roll;
    roll.partition = kRollupPartition;
    roll.snapshot_id = ev.snapshot_id;
    roll.commit_ts = ev.commit_ts;
    roll.metrics["record_count"] = static_cast<double>(total_delta);
    out.push_back(insert_point(std::move(roll)));
  }

  // Column series from the files this commit added. Stats land in the
  // manifest at write time; this reads no data files.
  Manifest cur = live_files(dir_, meta_, ev.snapshot_id);
  std::unordered_set<std::string> before;
  if (snap.parent_id) {
    Manifest prev = live_files(dir_, meta_, *snap.parent_id);
    for (const auto& f : prev.data_files) before.insert(f.file_path);
  }
  std::map<std::string, std::vector<DataFileEntry>> added;
  for (const auto& f : cur.data_files) {
    if (before.count(f.file_path) == 0) added[f.partition_key].push_back(f);
  }

  for (auto& [partition, files] : added) {
    if (!maintenance) {
      for (const auto& f : files) added_sizes_.emplace_back(ev.commit_ts, f.file_size_bytes);
    }
    for (uint32_t column_id : meta_.stats_priority) {
      const ColumnSchema* col = meta_.schema.find_id(column_id);
      if (col == nullptr) continue;
      AggregatedColumnStats agg = aggregate_stats(files, column_id);

      SeriesPoint pt;
      pt.partition = partition;
      pt.column_id = column_id;
      pt.snapshot_id = ev.snapshot_id;
      pt.commit_ts = ev.commit_ts;
      pt.maintenance = maintenance;
      pt.not_ready = not_ready.count(partition) > 0;
      pt.metrics["record_count"] = static_cast<double>(agg.record_count);
      if (agg.value_count > 0) {
        pt.metrics["null_fraction"] =
            static_cast<double>(agg.null_count) / static_cast<double>(agg.value_count);
      }
      if (kind_is_numeric(col->kind) || col->kind == ValueKind::kTimestampMicros) {
        if (agg.lower_bound) {
          if (auto d = value_as_double(*agg.lower_bound, col->kind)) pt.metrics["min"] = *d;
        }
        if (agg.upper_bound) {
          if (auto d = value_as_double(*agg.upper_bound, col->kind)) pt.metrics["max"] = *d;
        }
      }
      if (auto s = agg.sum()) pt.metrics["sum"] = *s;
      if (theta_eligible(col->kind)) {
        try {
          pt.metrics["distinct_estimate"] =
              merged_theta_for_column(dir_, files, column_id).estimate();
        } catch (const MissingSidecarError&) {
          // Files written without sketches: the metric is simply absent.
        }
      }
      out.push_back(insert_point(std::move(pt)));
    }
  }

  if (!maintenance) {
    for (const auto& p : ev.partitions) {
      auto [it, inserted] = last_write_ts_.try_emplace(p, ev.commit_ts);
      if (!inserted) it->second = std::max(it->second, ev.commit_ts);
    }
  }

  // Gap metric for arrival points, recomputed around any late insertion.
  for (SeriesPoint* pt : out) {
    if (pt->column_id) continue;
    auto& vec = series_[SeriesKey{pt->partition, std::nullopt}];
    for (size_t i = 0; i < vec.size(); ++i) {
      if (i == 0) {
        vec[i].metrics.erase("inter_commit_gap_seconds");
      } else {
        vec[i].metrics["inter_commit_gap_seconds"] =
            static_cast<double>(vec[i].commit_ts - vec[i - 1].commit_ts) / 1e6;
      }
    }
  }
  return out;
}

void Observer::detect(const SeriesPoint& point, std::vector<Alert>& out) {
  if (point.maintenance) return;
  const auto& vec = series_.at(SeriesKey{point.partition, point.column_id});
  // History: up to window points before this one, maintenance excluded.
  size_t self = 0;
  for (size_t i = 0; i < vec.size(); ++i) {
    if (&vec[i] == &point) { self = i; break; }
  }
  auto history_of = [&](const char* metric) {
    std::vector<double> h;
    for (size_t i = self; i > 0 && h.size() < cfg_.window;) {
      --i;
      if (vec[i].maintenance) continue;
      auto it = vec[i].metrics.find(metric);
      if (it != vec[i].metrics.end()) h.push_back(it->second);
    }
    std::reverse(h.begin(), h.end());
    return h;
  };
  auto z_check = [&](const char* metric, AlertKind kind) {
    auto it = point.metrics.find(metric);
    if (it == point.metrics.end()) return;
    std::vector<double> h = history_of(metric);
    if (h.size() < cfg_.min_history) {
      ++skipped_checks_;
      return;
    }
    double z = robust_z(h, it->second, cfg_.epsilon);
    if (std::fabs(z) > cfg_.z_threshold) {
      Alert a;
      a.kind = kind;
      a.partition = point.partition;
      a.column_id = point.column_id;
      a.snapshot_id = point.snapshot_id;
      a.at_ts = point.commit_ts;
      a.observed = z;
      a.threshold = cfg_.z_threshold;
      a.detail = std::string(metric) + " " + format_double(it->second) +
                 " against trailing median " + format_double(median_of(h));
      out.push_back(a);
    }
  };

  if (!point.column_id) {
    z_check("record_count", AlertKind::kRowCountAnomaly);

    auto git = point.metrics.find("inter_commit_gap_seconds");
    if (git != point.metrics.end()) {
      std::vector<double> gaps = history_of("inter_commit_gap_seconds");
      if (gaps.size() < cfg_.min_history) {
        ++skipped_checks_;
      } else {
        double med = median_of(gaps);
        if (med > 0) {
          double bound = cfg_.arrival_multiplier * med;
          if (git->second > bound) {
            Alert a;
            a.kind = AlertKind::kArrivalDeviation;
            a.partition = point.partition;
            a.snapshot_id = point.snapshot_id;
            a.at_ts = point.commit_ts;
            a.observed = git->second;
            a.threshold = bound;
            a.detail = "commit gap " + format_double(git->second) + "s, trailing median " +
                       format_double(med) + "s";
            out.push_back(a);
          }
        } else {
          ++skipped_checks_;
        }
      }
    }

    if (point.partition == kRollupPartition && cfg_.partitions_per_day > 0) {
      std::set<std::string> day_partitions;
      for (const auto& [ts, p] : arrivals_) {
        if (ts > point.commit_ts - kDayMicros && ts <= point.commit_ts) day_partitions.insert(p);
      }
      if (day_partitions.size() > cfg_.partitions_per_day) {
        std::vector<double> sizes;
        for (const auto& [ts, bytes] : added_sizes_) {
          if (ts > point.commit_ts - kDayMicros && ts <= point.commit_ts) {
            sizes.push_back(static_cast<double>(bytes));
          }
        }
        if (!sizes.empty() &&
            median_of(sizes) < static_cast<double>(cfg_.small_file_bytes)) {
          Alert a;
          a.kind = AlertKind::kOverPartitioning;
          a.partition = kRollupPartition;
          a.snapshot_id = point.snapshot_id;
          a.at_ts = point.commit_ts;
          a.observed = static_cast<double>(day_partitions.size());
          a.threshold = static_cast<double>(cfg_.partitions_per_day);
          a.detail = std::to_string(day_partitions.size()) +
                     " partitions touched in 24h with median file size " +
                     format_double(median_of(sizes)) + " bytes";
          out.push_back(a);
        }
      }
    }
    return;
  }

  z_check("null_fraction", AlertKind::kNullDrift);

  const ColumnSchema* col = meta_.schema.find_id(*point.column_id);
  if (col != nullptr) {
    auto rit = cfg_.ranges.find(col->name);
    if (rit != cfg_.ranges.end()) {
      auto breach = [&](const char* metric, bool low) {
        auto it = point.metrics.find(metric);
        if (it == point.metrics.end()) return;
        const auto& bound = low ? rit->second.min : rit->second.max;
        if (!bound) return;
        bool bad = low ? it->second < *bound : it->second > *bound;
        if (!bad) return;
        Alert a;
        a.kind = AlertKind::kRangeViolation;
        a.partition = point.partition;
        a.column_id = point.column_id;
        a.snapshot_id = point.snapshot_id;
        a.at_ts = point.commit_ts;
        a.observed = it->second;
        a.threshold = *bound;
        a.detail = std::string(metric) + " " + format_double(it->second) +
                   (low ? " below configured minimum " : " above configured maximum ") +
                   format_double(*bound);
        out.push_back(a);
      };
      breach("min", true);
      breach("max", false);
    }
  }
}

std::vector<Alert> Observer::replay() {
  series_.clear();
  arrivals_.clear();
  added_sizes_.clear();
  last_write_ts_.clear();
  skipped_checks_ = 0;
  meta_ = load_table(dir_);

  ZeroScanGuard guard("observability replay");
  std::vector<Alert> alerts;
  for (const CommitEvent& ev : read_events(dir_)) {
    for (SeriesPoint* pt : ingest(ev)) detect(*pt, alerts);
  }
  guard.check();
  return alerts;
}

std::vector<Alert> Observer::sweep(int64_t now_micros) const {
  std::vector<Alert> alerts;
  auto it = series_.find(SeriesKey{kRollupPartition, std::nullopt});
  if (it == series_.end() || it->second.empty()) return alerts;
  const auto& vec = it->second;

  std::vector<double> gaps;
  for (size_t i = vec.size(); i > 0 && gaps.size() < cfg_.window;) {
    --i;
    auto git = vec[i].metrics.find("inter_commit_gap_seconds");
    if (git != vec[i].metrics.end()) gaps.push_back(git->second);
  }
  if (gaps.size() < cfg_.min_history) return alerts;
  double med = median_of(gaps);
  if (med <= 0) return alerts;

  double elapsed = static_cast<double>(now_micros - vec.back().commit_ts) / 1e6;
  double bound = cfg_.arrival_multiplier * med;
  if (elapsed > bound) {
    Alert a;
    a.kind = AlertKind::kFreshnessGap;
    a.partition = kRollupPartition;
    a.snapshot_id = 0;
    a.at_ts = now_micros;
    a.observed = elapsed;
    a.threshold = bound;
    a.detail = "no user commit for " + format_double(elapsed) + "s, trailing median gap " +
               format_double(med) + "s";
    alerts.push_back(a);
  }
  return alerts;
}

}  // namespace lakedq
