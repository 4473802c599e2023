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

#include "lakedq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <sstream>
#include <unordered_set>

#include "lakedq/csv.hpp"
#include "lakedq/io_counter.hpp"
#include "lakedq/kll_sketch.hpp"
#include "lakedq/sketch_merge.hpp"
#include "lakedq/stats.hpp"
#include "lakedq/theta_sketch.hpp"
#include "lakedq/write_path.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lakedq {

namespace {

// Per-file partial, merged in manifest file order so serial and parallel
// scans land on identical results.
struct ColPart {
  uint64_t value_count = 0;
  uint64_t null_count = 0;
  uint64_t nan_count = 0;
  uint64_t size_bytes = 0;
  std::optional<Value> minv, maxv;
  double sum = 0;
  uint64_t zero_count = 0;
  uint64_t true_count = 0;
  std::unordered_set<int64_t> distinct_ints;
  std::unordered_set<std::string> distinct_strings;
  std::vector<double> values;
};

struct FilePart {
  std::string file_path;
  uint64_t surviving = 0;
  std::vector<ColPart> cols;
};

FilePart scan_file(const TableDir& dir, const DataFileEntry& entry, const TableSchema& schema,
                   const std::vector<std::pair<size_t, const ColumnSchema*>>& prio,
                   const std::set<uint64_t>* dropped) {
  FilePart part;
  part.file_path = entry.file_path;
  part.cols.resize(prio.size());
  std::vector<Row> rows = read_data_rows(dir, entry.file_path, schema);
  if (rows.size() != entry.record_count)
    throw CorruptDataFileError(entry.file_path + ": manifest says " +
                               std::to_string(entry.record_count) + " records, file has " +
                               std::to_string(rows.size()));
  for (uint64_t pos = 0; pos < rows.size(); ++pos) {
    if (dropped && dropped->count(pos)) continue;
    ++part.surviving;
    const Row& row = rows[pos];
    for (size_t p = 0; p < prio.size(); ++p) {
      const ColumnSchema& col = *prio[p].second;
      const Value& v = row[prio[p].first];
      ColPart& c = part.cols[p];
      ++c.value_count;
      bool force = col.kind == ValueKind::kString && !is_null(v) &&
                   std::get<std::string>(v).empty();
      c.size_bytes += csv::encode_field(format_value(v, col.kind), force).size();
      if (is_null(v)) {
        ++c.null_count;
        continue;
      }
      if (col.kind == ValueKind::kFloat64 && std::isnan(std::get<double>(v))) {
        ++c.nan_count;
        continue;
      }
      if (!c.minv || compare_values(v, *c.minv, col.kind) < 0) c.minv = v;
      if (!c.maxv || compare_values(v, *c.maxv, col.kind) > 0) c.maxv = v;
      switch (col.kind) {
        case ValueKind::kInt64: {
          int64_t x = std::get<int64_t>(v);
          c.sum += static_cast<double>(x);
          if (x == 0) ++c.zero_count;
          c.distinct_ints.insert(x);
          c.values.push_back(static_cast<double>(x));
          break;
        }
        case ValueKind::kFloat64: {
          double x = std::get<double>(v);
          c.sum += x;
          if (x == 0.0) ++c.zero_count;
          c.values.push_back(x);
          break;
        }
        case ValueKind::kBool:
          if (std::get<bool>(v)) ++c.true_count;
          break;
        case ValueKind::kString:
          c.distinct_strings.insert(std::get<std::string>(v));
          break;
        case ValueKind::kTimestampMicros:
          c.distinct_ints.insert(std::get<int64_t>(v));
          break;
      }
    }
  }
  return part;
}

// Reads the physical delete files (through the counted channel; a scan pays
// for them) and cross-checks them against the manifest's counts.
std::map<std::string, std::set<uint64_t>> read_delete_files(const TableDir& dir,
                                                            const Manifest& live) {
  std::map<std::string, std::set<uint64_t>> dropped;
  for (const auto& d : live.delete_files) {
    std::string text = read_data_file(dir.resolve(d.file_path));
    uint64_t lines = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      dropped[j.at("file").get<std::string>()].insert(j.at("pos").get<uint64_t>());
      ++lines;
    }
    if (lines != d.delete_count)
      throw CorruptDataFileError(d.file_path + ": " + std::to_string(lines) +
                                 " positions on disk, manifest says " +
                                 std::to_string(d.delete_count));
  }
  return dropped;
}

std::optional<double> oracle_metric(const Metric& m, const OracleStats& stats,
                                    const TableSchema& schema, std::string* reason) {
  if (m.kind == MetricKind::kCount) return static_cast<double>(stats.record_count);
  const ColumnSchema& col = schema.by_name(m.column);
  const OracleColumn& c = stats.column(col.column_id);
  switch (m.kind) {
    case MetricKind::kMin:
    case MetricKind::kMax: {
      const std::optional<Value>& b = m.kind == MetricKind::kMin ? c.min_value : c.max_value;
      if (!b) {
        *reason = "empty aggregate: no values for " + m.column;
        return std::nullopt;
      }
      return value_as_double(*b, col.kind);
    }
    case MetricKind::kSum:
      return c.sum();
    case MetricKind::kMean: {
      uint64_t values = c.value_count - c.null_count;
      auto s = c.sum();
      if (!s || values == 0) {
        *reason = "mean undefined: no non-null values for " + m.column;
        return std::nullopt;
      }
      return *s / static_cast<double>(values);
    }
    case MetricKind::kZeroCount:
      if (!c.zero_count) {
        *reason = "no zero counter for " + m.column;
        return std::nullopt;
      }
      return static_cast<double>(*c.zero_count);
    case MetricKind::kTrueCount:
      if (!c.true_count) {
        *reason = "no true counter for " + m.column;
        return std::nullopt;
      }
      return static_cast<double>(*c.true_count);
    case MetricKind::kDistinct:
      return static_cast<double>(*c.distinct);
    case MetricKind::kMedian:
    case MetricKind::kPercentile:
    case MetricKind::kIqr: {
      if (c.sorted_values.empty()) {
        *reason = "empty aggregate: no values for " + m.column;
        return std::nullopt;
      }
      if (m.kind == MetricKind::kIqr) return c.quantile(0.75) - c.quantile(0.25);
      return c.quantile(m.kind == MetricKind::kMedian ? 0.5 : m.quantile);
    }
    case MetricKind::kCount:
      break;
  }
  return std::nullopt;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

std::optional<double> OracleColumn::sum() const {
  if (!has_sum) return std::nullopt;
  return fold_sum_terms(sum_terms);
}

double OracleColumn::quantile(double q) const {
  if (sorted_values.empty()) throw EmptySketchError("no values to take a quantile of");
  if (q < 0.0 || q > 1.0) throw ConfigError("quantile rank out of [0,1]");
  size_t n = sorted_values.size();
  if (q == 0.0) return sorted_values.front();
  if (q == 1.0) return sorted_values.back();
  size_t idx = static_cast<size_t>(std::ceil(q * static_cast<double>(n))) - 1;
  if (idx >= n) idx = n - 1;
  return sorted_values[idx];
}

double OracleColumn::rank(double v) const {
  if (sorted_values.empty()) throw EmptySketchError("no values to rank against");
  auto it = std::lower_bound(sorted_values.begin(), sorted_values.end(), v);
  return static_cast<double>(it - sorted_values.begin()) /
         static_cast<double>(sorted_values.size());
}

double OracleColumn::rank_upper(double v) const {
  if (sorted_values.empty()) throw EmptySketchError("no values to rank against");
  auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), v);
  return static_cast<double>(it - sorted_values.begin()) /
         static_cast<double>(sorted_values.size());
}

const OracleColumn& OracleStats::column(uint32_t column_id) const {
  for (const auto& c : columns)
    if (c.column_id == column_id) return c;
  throw UnknownColumnError("column id " + std::to_string(column_id) +
                           " is not a stats-priority column");
}

OracleStats oracle_stats(const TableDir& dir, const TableMetadata& meta, uint64_t snapshot_id,
                         const std::optional<std::string>& partition, bool parallel) {
  Manifest live = live_files(dir, meta, snapshot_id, partition);
  std::map<std::string, std::set<uint64_t>> dropped = read_delete_files(dir, live);

  std::vector<std::pair<size_t, const ColumnSchema*>> prio;
  for (uint32_t id : meta.stats_priority) {
    size_t index = 0;
    while (meta.schema.column_at(index).column_id != id) ++index;
    prio.emplace_back(index, &meta.schema.column_at(index));
  }

  std::vector<FilePart> parts(live.data_files.size());
  if (parallel) {
    std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t i = 0; i < live.data_files.size(); ++i) {
      try {
        const DataFileEntry& e = live.data_files[i];
        auto it = dropped.find(e.file_path);
        parts[i] = scan_file(dir, e, meta.schema, prio,
                             it == dropped.end() ? nullptr : &it->second);
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (size_t i = 0; i < live.data_files.size(); ++i) {
      const DataFileEntry& e = live.data_files[i];
      auto it = dropped.find(e.file_path);
      parts[i] =
          scan_file(dir, e, meta.schema, prio, it == dropped.end() ? nullptr : &it->second);
    }
  }

  OracleStats out;
  out.columns.resize(prio.size());
  for (size_t p = 0; p < prio.size(); ++p) {
    OracleColumn& c = out.columns[p];
    c.column_id = prio[p].second->column_id;
    c.kind = prio[p].second->kind;
    if (kind_is_numeric(c.kind)) {
      c.has_sum = true;
      c.zero_count = 0;
    }
    if (c.kind == ValueKind::kBool) c.true_count = 0;
    if (theta_eligible(c.kind)) c.distinct = 0;
  }
  std::vector<std::unordered_set<int64_t>> all_ints(prio.size());
  std::vector<std::unordered_set<std::string>> all_strings(prio.size());
  for (const FilePart& part : parts) {
    out.record_count += part.surviving;
    for (size_t p = 0; p < prio.size(); ++p) {
      const ColPart& fc = part.cols[p];
      OracleColumn& c = out.columns[p];
      c.value_count += fc.value_count;
      c.null_count += fc.null_count;
      c.nan_count += fc.nan_count;
      c.column_size_bytes += fc.size_bytes;
      if (fc.minv && (!c.min_value || compare_values(*fc.minv, *c.min_value, c.kind) < 0))
        c.min_value = fc.minv;
      if (fc.maxv && (!c.max_value || compare_values(*fc.maxv, *c.max_value, c.kind) > 0))
        c.max_value = fc.maxv;
      if (c.has_sum) {
        c.sum_terms.emplace_back(part.file_path, fc.sum);
        *c.zero_count += fc.zero_count;
      }
      if (c.true_count) *c.true_count += fc.true_count;
      all_ints[p].insert(fc.distinct_ints.begin(), fc.distinct_ints.end());
      all_strings[p].insert(fc.distinct_strings.begin(), fc.distinct_strings.end());
      c.sorted_values.insert(c.sorted_values.end(), fc.values.begin(), fc.values.end());
    }
  }
  for (size_t p = 0; p < prio.size(); ++p) {
    OracleColumn& c = out.columns[p];
    if (c.distinct) *c.distinct = all_ints[p].size() + all_strings[p].size();
    std::sort(c.sorted_values.begin(), c.sorted_values.end());
  }
  return out;
}

RuleResult oracle_rule(const Rule& rule, const TableDir& dir, const TableMetadata& meta,
                       uint64_t snapshot_id, const EvalOptions& options) {
  RuleResult res;
  res.rule_id = rule.rule_id;
  res.snapshot_id = snapshot_id;
  res.evaluated_from = "scan";

  if (rule.form == Rule::Form::kFreshness) {
    // Freshness is defined over commit metadata; the scan oracle computes
    // the same quantity rather than pretending rows carry timestamps.
    std::optional<int64_t> last;
    for (const auto& s : meta.snapshot_log) {
      if (s.snapshot_id > snapshot_id) break;
      if (!is_maintenance(s.operation)) last = s.commit_ts;
    }
    if (!last) {
      res.verdict = Verdict::kIndeterminate;
      res.reason = "no user commits yet";
      return res;
    }
    int64_t now = options.now ? *options.now : system_clock_micros()();
    int64_t gap = now - *last;
    res.observed = fmt(static_cast<double>(gap));
    res.observed_value = static_cast<double>(gap);
    res.bound = fmt(static_cast<double>(rule.freshness_micros));
    res.verdict = gap <= rule.freshness_micros ? Verdict::kPass : Verdict::kFail;
    return res;
  }

  if (rule.form == Rule::Form::kExpr) {
    Manifest live = live_files(dir, meta, snapshot_id, rule.partition);
    std::map<std::string, std::set<uint64_t>> dropped = read_delete_files(dir, live);
    std::map<std::string, size_t> col_index;
    for (size_t i = 0; i < meta.schema.size(); ++i)
      col_index[meta.schema.column_at(i).name] = i;
    uint64_t violations = 0, scanned = 0;
    for (const auto& e : live.data_files) {
      std::vector<Row> rows = read_data_rows(dir, e.file_path, meta.schema);
      const std::set<uint64_t>* gone = nullptr;
      if (auto it = dropped.find(e.file_path); it != dropped.end()) gone = &it->second;
      for (uint64_t pos = 0; pos < rows.size(); ++pos) {
        if (gone && gone->count(pos)) continue;
        ++scanned;
        const Row& row = rows[pos];
        dsl::Resolver resolve = [&](const dsl::Expr& leaf,
                                    std::string* reason) -> std::optional<double> {
          if (leaf.kind != dsl::Expr::Kind::kVar) {
            *reason = "unsupported term in row predicate";
            return std::nullopt;
          }
          size_t idx = col_index.at(leaf.name);
          const Value& v = row[idx];
          auto d = value_as_double(v, meta.schema.column_at(idx).kind);
          if (!d) *reason = "null or non-numeric value";
          return d;
        };
        std::string why;
        auto ok = dsl::evaluate_predicate(rule.expr_parsed, resolve, &why);
        // A row that cannot be judged counts against the rule.
        if (!ok || !*ok) ++violations;
      }
    }
    res.observed = std::to_string(violations) + " violating rows of " + std::to_string(scanned);
    res.observed_value = static_cast<double>(violations);
    res.bound = "0 violations";
    res.verdict = violations == 0 ? Verdict::kPass : Verdict::kFail;
    return res;
  }

  OracleStats stats = oracle_stats(dir, meta, snapshot_id, rule.partition);

  if (rule.form == Rule::Form::kNotNull) {
    res.bound = "< " + fmt(rule.bound);
    const ColumnSchema& col = meta.schema.by_name(rule.metric.column);
    const OracleColumn& c = stats.column(col.column_id);
    if (c.value_count == 0) {
      res.verdict = Verdict::kIndeterminate;
      res.reason = "empty aggregate: no rows";
      return res;
    }
    double frac = static_cast<double>(c.null_count) / static_cast<double>(c.value_count);
    res.observed = fmt(frac);
    res.observed_value = frac;
    res.verdict = frac < rule.bound ? Verdict::kPass : Verdict::kFail;
    return res;
  }

  if (rule.form == Rule::Form::kMetricCmp) {
    if (rule.string_bound) {
      res.bound = "'" + *rule.string_bound + "'";
      const ColumnSchema& col = meta.schema.by_name(rule.metric.column);
      const OracleColumn& c = stats.column(col.column_id);
      const std::optional<Value>& b =
          rule.metric.kind == MetricKind::kMin ? c.min_value : c.max_value;
      if (!b) {
        res.verdict = Verdict::kIndeterminate;
        res.reason = "empty aggregate: no values for " + col.name;
        return res;
      }
      const std::string& exact = std::get<std::string>(*b);
      res.observed = "'" + exact + "'";
      int c3 = exact.compare(*rule.string_bound);
      bool pass = false;
      switch (rule.cmp) {
        case dsl::CmpOp::kLt: pass = c3 < 0; break;
        case dsl::CmpOp::kLe: pass = c3 <= 0; break;
        case dsl::CmpOp::kGt: pass = c3 > 0; break;
        case dsl::CmpOp::kGe: pass = c3 >= 0; break;
        case dsl::CmpOp::kEq: pass = c3 == 0; break;
        case dsl::CmpOp::kNe: pass = c3 != 0; break;
      }
      res.verdict = pass ? Verdict::kPass : Verdict::kFail;
      return res;
    }
    res.bound = std::string(cmp_name(rule.cmp)) + " " + fmt(rule.bound);
    std::string reason;
    auto value = oracle_metric(rule.metric, stats, meta.schema, &reason);
    if (!value) {
      res.verdict = Verdict::kIndeterminate;
      res.reason = reason;
      return res;
    }
    res.observed = fmt(*value);
    res.observed_value = *value;
    res.verdict =
        dsl::cmp_apply(rule.cmp, *value, rule.bound) ? Verdict::kPass : Verdict::kFail;
    return res;
  }

  // compare(metric, reference, tolerance)
  std::string reason;
  auto cur = oracle_metric(rule.metric, stats, meta.schema, &reason);
  if (!cur) {
    res.verdict = Verdict::kIndeterminate;
    res.reason = reason;
    return res;
  }
  std::optional<OracleStats> ref_stats;
  if (rule.reference == "prev_snapshot") {
    const Snapshot& snap = meta.snapshot(snapshot_id);
    if (!snap.parent_id) {
      res.verdict = Verdict::kIndeterminate;
      res.reason = "no parent snapshot to compare against";
      return res;
    }
    ref_stats = oracle_stats(dir, meta, *snap.parent_id, rule.partition);
  } else {
    if (!rule.partition) {
      res.verdict = Verdict::kIndeterminate;
      res.reason = "prev_partition needs a partition-scoped rule";
      return res;
    }
    Manifest all = live_files(dir, meta, snapshot_id);
    std::set<std::string> keys;
    for (const auto& e : all.data_files) keys.insert(e.partition_key);
    std::optional<std::string> prev;
    for (const auto& k : keys)
      if (k < *rule.partition && (!prev || k > *prev)) prev = k;
    if (!prev) {
      res.verdict = Verdict::kIndeterminate;
      res.reason = "no previous partition to compare against";
      return res;
    }
    ref_stats = oracle_stats(dir, meta, snapshot_id, prev);
  }
  auto ref = oracle_metric(rule.metric, *ref_stats, meta.schema, &reason);
  if (!ref) {
    res.verdict = Verdict::kIndeterminate;
    res.reason = "reference: " + reason;
    return res;
  }
  res.observed = fmt(*cur);
  res.observed_value = *cur;
  if (rule.absolute_tolerance) {
    res.bound = fmt(*ref) + " +/- " + fmt(rule.tolerance);
    res.verdict =
        std::fabs(*cur - *ref) <= rule.tolerance ? Verdict::kPass : Verdict::kFail;
    return res;
  }
  if (*ref == 0.0) {
    res.bound = "0 (exact)";
    res.verdict = *cur == 0.0 ? Verdict::kPass : Verdict::kFail;
    return res;
  }
  res.bound = fmt(*ref) + " +/- " + fmt(rule.tolerance * 100.0) + "%";
  res.verdict = std::fabs(*cur - *ref) / std::fabs(*ref) <= rule.tolerance ? Verdict::kPass
                                                                           : Verdict::kFail;
  return res;
}

ValidationReport validate_snapshot(const TableDir& dir, const TableMetadata& meta,
                                   uint64_t snapshot_id, bool parallel) {
  ValidationReport report;
  report.snapshot_id = snapshot_id;

  uint64_t opens_before = data_file_open_count();
  OracleStats oracle = oracle_stats(dir, meta, snapshot_id, std::nullopt, parallel);
  report.data_file_opens = data_file_open_count() - opens_before;

  Manifest live = live_files(dir, meta, snapshot_id);

  auto add = [&](uint32_t column_id, const std::string& field, const std::string& manifest_v,
                 const std::string& oracle_v, bool match) {
    report.entries.push_back({column_id, field, manifest_v, oracle_v, match});
    if (!match) report.clean = false;
  };

  add(0, "record_count", std::to_string(corrected_record_count(live)),
      std::to_string(oracle.record_count),
      corrected_record_count(live) == oracle.record_count);

  for (const OracleColumn& oc : oracle.columns) {
    AggregatedColumnStats agg;
    try {
      agg = aggregate_stats(live.data_files, oc.column_id);
    } catch (const MissingStatsError& e) {
      add(oc.column_id, "stats", "(missing)", "(scanned)", false);
      continue;
    }
    auto num = [](uint64_t v) { return std::to_string(v); };
    add(oc.column_id, "value_count", num(agg.value_count), num(oc.value_count),
        agg.value_count == oc.value_count);
    add(oc.column_id, "null_count", num(agg.null_count), num(oc.null_count),
        agg.null_count == oc.null_count);
    add(oc.column_id, "nan_count", num(agg.nan_count), num(oc.nan_count),
        agg.nan_count == oc.nan_count);
    add(oc.column_id, "column_size_bytes", num(agg.column_size_bytes),
        num(oc.column_size_bytes), agg.column_size_bytes == oc.column_size_bytes);

    if (oc.kind == ValueKind::kString) {
      // Truncated bounds cannot match exactly; they must contain the true
      // range.
      std::string mlo = agg.lower_bound ? std::get<std::string>(*agg.lower_bound) : "";
      std::string olo = oc.min_value ? std::get<std::string>(*oc.min_value) : "";
      bool lo_ok = agg.lower_bound.has_value() == oc.min_value.has_value() &&
                   (!oc.min_value || mlo <= olo);
      add(oc.column_id, "lower_bound(contains)", "'" + mlo + "'", "'" + olo + "'", lo_ok);
      std::string ohi = oc.max_value ? std::get<std::string>(*oc.max_value) : "";
      bool hi_ok = true;
      if (oc.max_value)
        hi_ok = !agg.upper_bound || std::get<std::string>(*agg.upper_bound) >= ohi;
      else
        hi_ok = !agg.upper_bound;
      add(oc.column_id, "upper_bound(contains)",
          agg.upper_bound ? "'" + std::get<std::string>(*agg.upper_bound) + "'" : "(open)",
          "'" + ohi + "'", hi_ok);
    } else {
      auto bound_repr = [&](const std::optional<Value>& v) {
        return v ? format_value(*v, oc.kind) : "(none)";
      };
      bool lo_ok = agg.lower_bound.has_value() == oc.min_value.has_value() &&
                   (!oc.min_value || compare_values(*agg.lower_bound, *oc.min_value, oc.kind) == 0);
      bool hi_ok = agg.upper_bound.has_value() == oc.max_value.has_value() &&
                   (!oc.max_value || compare_values(*agg.upper_bound, *oc.max_value, oc.kind) == 0);
      add(oc.column_id, "lower_bound", bound_repr(agg.lower_bound), bound_repr(oc.min_value),
          lo_ok);
      add(oc.column_id, "upper_bound", bound_repr(agg.upper_bound), bound_repr(oc.max_value),
          hi_ok);
    }

    if (oc.has_sum) {
      std::string ms = agg.sum() ? format_double(*agg.sum()) : "(none)";
      std::string os = format_double(*oc.sum());
      add(oc.column_id, "sum", ms, os, ms == os);  // shortest repr is injective
      add(oc.column_id, "zero_count",
          agg.zero_count ? num(*agg.zero_count) : "(none)", num(*oc.zero_count),
          agg.zero_count && *agg.zero_count == *oc.zero_count);
    }
    if (oc.true_count)
      add(oc.column_id, "true_count", agg.true_count ? num(*agg.true_count) : "(none)",
          num(*oc.true_count), agg.true_count && *agg.true_count == *oc.true_count);

    if (oc.distinct) {
      try {
        ThetaSketch merged = merged_theta_for_column(dir, live.data_files, oc.column_id);
        double est = merged.estimate();
        double exact = static_cast<double>(*oc.distinct);
        double rel = exact == 0.0 ? (est == 0.0 ? 0.0 : 1.0) : std::fabs(est - exact) / exact;
        if (!report.theta_max_rel_error || rel > *report.theta_max_rel_error)
          report.theta_max_rel_error = rel;
      } catch (const MissingSidecarError&) {
        // No sketches registered for this file set; nothing to grade.
      }
    }
  }
  return report;
}

}  // namespace lakedq
