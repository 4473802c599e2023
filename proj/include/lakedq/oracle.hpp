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
#include <optional>
#include <string>
#include <vector>

#include "lakedq/rules.hpp"
#include "lakedq/table.hpp"

// Ground truth by brute force: reads every live row, applies positional
// deletes, and recomputes exactly what the metadata path claims to know.
// Exists to catch the zero-scan path lying, so it shares no aggregation
// code with it beyond the canonical sum fold.

namespace lakedq {

struct OracleColumn {
  uint32_t column_id = 0;
  ValueKind kind = ValueKind::kInt64;
  uint64_t value_count = 0;  // includes nulls
  uint64_t null_count = 0;
  uint64_t nan_count = 0;
  uint64_t column_size_bytes = 0;
  std::optional<Value> min_value;  // untruncated, NaN excluded
  std::optional<Value> max_value;
  bool has_sum = false;
  std::vector<std::pair<std::string, double>> sum_terms;  // per file
  std::optional<uint64_t> zero_count;
  std::optional<uint64_t> true_count;
  std::optional<uint64_t> distinct;   // exact, for id/label/timestamp columns
  std::vector<double> sorted_values;  // numeric, non-null, non-NaN

  std::optional<double> sum() const;

  // Same selection rule as the sketch: smallest item whose cumulative
  // weight reaches q*n, with q=0 and q=1 pinned to the extremes.
  double quantile(double q) const;
  // fraction of values strictly below v
  double rank(double v) const;
  // fraction of values at or below v; with rank() this brackets the true
  // rank interval of v, which is what sketch error bands are stated over
  double rank_upper(double v) const;
};

struct OracleStats {
  uint64_t record_count = 0;  // surviving rows after deletes
  std::vector<OracleColumn> columns;  // stats-priority order

  const OracleColumn& column(uint32_t column_id) const;  // UnknownColumnError
};

// Scans the live set at a snapshot. `parallel` distributes files across
// OpenMP threads; both modes produce identical results and the serial one
// is the reference the tests pin the parallel one against.
OracleStats oracle_stats(const TableDir& dir, const TableMetadata& meta, uint64_t snapshot_id,
                         const std::optional<std::string>& partition = std::nullopt,
                         bool parallel = false);

// Evaluates the rule's mathematical definition on exact aggregates;
// evaluated_from = "scan". expr(...) runs per row: a row violates when the
// predicate is false or cannot be evaluated on that row.
RuleResult oracle_rule(const Rule& rule, const TableDir& dir, const TableMetadata& meta,
                       uint64_t snapshot_id, const EvalOptions& options = {});

struct ValidationEntry {
  uint32_t column_id = 0;  // 0 for table-level fields
  std::string field;
  std::string manifest_value;
  std::string oracle_value;
  bool match = false;
};

struct ValidationReport {
  uint64_t snapshot_id = 0;
  bool clean = true;  // every comparable field matched exactly
  std::vector<ValidationEntry> entries;
  uint64_t data_file_opens = 0;  // cost of this validation
  std::optional<double> theta_max_rel_error;  // worst distinct-estimate error seen
};

// Field-by-field comparison of manifest aggregates against the scan.
// Exact-match fields must agree bit for bit on copy-on-write tables; string
// bounds are checked for containment (truncation is lossy by design);
// sketch estimates are reported with their relative error, not matched.
ValidationReport validate_snapshot(const TableDir& dir, const TableMetadata& meta,
                                   uint64_t snapshot_id, bool parallel = false);

}  // namespace lakedq
