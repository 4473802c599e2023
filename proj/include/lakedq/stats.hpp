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

#include "lakedq/schema.hpp"
#include "lakedq/value.hpp"

namespace lakedq {

// String bounds are truncated to this many UTF-8 bytes before they enter a
// manifest; see truncated_lower_bound / truncated_upper_bound.
inline constexpr size_t kStringBoundPrefixBytes = 16;

// Per-file, per-column statistics block.
//  - value_count counts every row written for the column, nulls included.
//  - Bounds exclude nulls and NaNs; both absent iff every value is null.
//  - sum and zero_count are kept for numeric columns only, true_count for
//    bool columns only; all three exclude nulls, and sum/zero_count also
//    exclude NaNs.
//  - column_size_bytes is the total size of the column's encoded fields as
//    written to the data file.
struct ColumnStats {
  uint32_t column_id = 0;
  uint64_t value_count = 0;
  uint64_t null_count = 0;
  uint64_t nan_count = 0;
  std::optional<Value> lower_bound;
  std::optional<Value> upper_bound;
  uint64_t column_size_bytes = 0;
  std::optional<double> sum;
  std::optional<uint64_t> zero_count;
  std::optional<uint64_t> true_count;

  bool operator==(const ColumnStats&) const = default;
};

// Throws CorruptDataFileError when an invariant does not hold
// (count relations, bound ordering, counter caps).
void check_stats_invariants(const ColumnStats& s, ValueKind kind);

// 16-byte prefix; a prefix is always <= the original, so it stays a valid
// lower bound. Strings at or under the limit pass through untouched.
std::string truncated_lower_bound(const std::string& s);
// Prefix with its last byte incremented, which is >= any string sharing the
// prefix. Absent when the last prefix byte is 0xFF (increment overflows).
std::optional<std::string> truncated_upper_bound(const std::string& s);

// Single-pass accumulator driven by the encoding loop. One instance per
// column per file.
class StatsAccumulator {
 public:
  StatsAccumulator(uint32_t column_id, ValueKind kind);

  // encoded_bytes: size of the field as written to the data file.
  void update(const Value& v, size_t encoded_bytes);
  // Applies string-bound truncation and returns the finished block.
  ColumnStats finish() const;

  ValueKind kind() const { return kind_; }

 private:
  uint32_t column_id_;
  ValueKind kind_;
  uint64_t value_count_ = 0;
  uint64_t null_count_ = 0;
  uint64_t nan_count_ = 0;
  uint64_t size_bytes_ = 0;
  std::optional<Value> lower_;
  std::optional<Value> upper_;
  double sum_ = 0.0;
  uint64_t zero_count_ = 0;
  uint64_t true_count_ = 0;
};

// The one canonical fold order for per-file float sums: ascending file
// path. Shared with the scan oracle so both sides produce the same double
// bit for bit.
double fold_sum_terms(std::vector<std::pair<std::string, double>> terms);

// Cross-file aggregate for one column. Counts add exactly; bounds compose by
// min/max. The float sum is kept as one term per file and folded in sorted
// file-path order on demand, so grouping files in any way yields the exact
// same double (fold order is a function of the paths, not of how the
// aggregation tree was shaped).
struct AggregatedColumnStats {
  uint32_t column_id = 0;
  uint64_t record_count = 0;
  uint64_t value_count = 0;
  uint64_t null_count = 0;
  uint64_t nan_count = 0;
  uint64_t column_size_bytes = 0;
  std::optional<Value> lower_bound;
  std::optional<Value> upper_bound;
  std::optional<uint64_t> zero_count;
  std::optional<uint64_t> true_count;
  bool has_sum = false;
  // (file_path, per-file sum), unordered.
  std::vector<std::pair<std::string, double>> sum_terms;

  // Folds sum_terms by ascending file path. nullopt when the column has no
  // sum counter.
  std::optional<double> sum() const;
  // sum / (value_count - null_count); nullopt when no sum or no non-null
  // values.
  std::optional<double> mean() const;
};

// Folds one file's stats into the aggregate; file paths must be distinct.
void aggregate_add(AggregatedColumnStats& agg, const std::string& file_path,
                   uint64_t file_record_count, const ColumnStats& s);
// Combines two group aggregates (disjoint file sets) into the first.
void aggregate_combine(AggregatedColumnStats& agg, const AggregatedColumnStats& other);

}  // namespace lakedq
