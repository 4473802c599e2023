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

#include "lakedq/stats.hpp"

#include <algorithm>
#include <cmath>

#include "lakedq/errors.hpp"

namespace lakedq {

void check_stats_invariants(const ColumnStats& s, ValueKind kind) {
  auto fail = [&](const std::string& what) {
    throw CorruptDataFileError("column " + std::to_string(s.column_id) + ": " + what);
  };
  if (s.null_count > s.value_count) fail("null_count exceeds value_count");
  uint64_t non_null = s.value_count - s.null_count;
  if (s.nan_count > non_null) fail("nan_count exceeds non-null count");
  if (s.nan_count > 0 && kind != ValueKind::kFloat64) fail("nan_count on non-float column");
  bool lower = s.lower_bound.has_value(), upper = s.upper_bound.has_value();
  if (lower != upper && !(kind == ValueKind::kString && lower && !upper)) {
    // string upper may be dropped by truncation overflow; any other asymmetry
    // is a bug
    fail("bound presence mismatch");
  }
  if (non_null == s.nan_count && lower) fail("bounds present without bounded values");
  if (lower && upper && compare_values(*s.lower_bound, *s.upper_bound, kind) > 0) {
    fail("lower_bound above upper_bound");
  }
  if (s.zero_count && *s.zero_count > non_null) fail("zero_count exceeds non-null count");
  if (s.true_count && *s.true_count > non_null) fail("true_count exceeds non-null count");
  if (s.sum && !kind_is_numeric(kind)) fail("sum on non-numeric column");
  if (s.true_count && kind != ValueKind::kBool) fail("true_count on non-bool column");
}

std::string truncated_lower_bound(const std::string& s) {
  if (s.size() <= kStringBoundPrefixBytes) return s;
  return s.substr(0, kStringBoundPrefixBytes);
}

std::optional<std::string> truncated_upper_bound(const std::string& s) {
  if (s.size() <= kStringBoundPrefixBytes) return s;
  std::string prefix = s.substr(0, kStringBoundPrefixBytes);
  unsigned char last = static_cast<unsigned char>(prefix.back());
  if (last == 0xFF) return std::nullopt;
  prefix.back() = static_cast<char>(last + 1);
  return prefix;
}

StatsAccumulator::StatsAccumulator(uint32_t column_id, ValueKind kind)
    : column_id_(column_id), kind_(kind) {}

void StatsAccumulator::update(const Value& v, size_t encoded_bytes) {
  ++value_count_;
  size_bytes_ += encoded_bytes;
  if (is_null(v)) {
    ++null_count_;
    return;
  }
  if (kind_ == ValueKind::kFloat64 && std::isnan(std::get<double>(v))) {
    ++nan_count_;
    return;
  }
  if (!lower_ || compare_values(v, *lower_, kind_) < 0) lower_ = v;
  if (!upper_ || compare_values(v, *upper_, kind_) > 0) upper_ = v;
  switch (kind_) {
    case ValueKind::kInt64: {
      int64_t x = std::get<int64_t>(v);
      sum_ += static_cast<double>(x);
      if (x == 0) ++zero_count_;
      break;
    }
    case ValueKind::kFloat64: {
      double x = std::get<double>(v);
      sum_ += x;
      if (x == 0.0) ++zero_count_;
      break;
    }
    case ValueKind::kBool:
      if (std::get<bool>(v)) ++true_count_;
      break;
    default:
      break;
  }
}

ColumnStats StatsAccumulator::finish() const {
  ColumnStats s;
  s.column_id = column_id_;
  s.value_count = value_count_;
  s.null_count = null_count_;
  s.nan_count = nan_count_;
  s.column_size_bytes = size_bytes_;
  if (lower_) {
    if (kind_ == ValueKind::kString) {
      s.lower_bound = truncated_lower_bound(std::get<std::string>(*lower_));
      if (auto ub = truncated_upper_bound(std::get<std::string>(*upper_))) s.upper_bound = *ub;
    } else {
      s.lower_bound = lower_;
      s.upper_bound = upper_;
    }
  }
  if (kind_is_numeric(kind_)) {
    s.sum = sum_;
    s.zero_count = zero_count_;
  }
  if (kind_ == ValueKind::kBool) s.true_count = true_count_;
  return s;
}

double fold_sum_terms(std::vector<std::pair<std::string, double>> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (const auto& [path, term] : terms) total += term;
  return total;
}

std::optional<double> AggregatedColumnStats::sum() const {
  if (!has_sum) return std::nullopt;
  return fold_sum_terms(sum_terms);
}

std::optional<double> AggregatedColumnStats::mean() const {
  auto s = sum();
  if (!s) return std::nullopt;
  uint64_t denom = value_count - null_count;
  if (denom == 0) return std::nullopt;
  return *s / static_cast<double>(denom);
}

void aggregate_add(AggregatedColumnStats& agg, const std::string& file_path,
                   uint64_t file_record_count, const ColumnStats& s) {
  bool first = agg.record_count == 0 && agg.value_count == 0 && agg.sum_terms.empty();
  if (first) {
    agg.column_id = s.column_id;
    agg.has_sum = s.sum.has_value();
    agg.zero_count = s.zero_count ? std::optional<uint64_t>(0) : std::nullopt;
    agg.true_count = s.true_count ? std::optional<uint64_t>(0) : std::nullopt;
  }
  agg.record_count += file_record_count;
  agg.value_count += s.value_count;
  agg.null_count += s.null_count;
  agg.nan_count += s.nan_count;
  agg.column_size_bytes += s.column_size_bytes;
  if (s.lower_bound) {
    // bound kind is uniform per column; compare by the stored alternative
    ValueKind k = std::holds_alternative<std::string>(*s.lower_bound) ? ValueKind::kString
                  : std::holds_alternative<double>(*s.lower_bound)    ? ValueKind::kFloat64
                  : std::holds_alternative<bool>(*s.lower_bound)      ? ValueKind::kBool
                                                                      : ValueKind::kInt64;
    if (!agg.lower_bound || compare_values(*s.lower_bound, *agg.lower_bound, k) < 0)
      agg.lower_bound = s.lower_bound;
    if (s.upper_bound &&
        (!agg.upper_bound || compare_values(*s.upper_bound, *agg.upper_bound, k) > 0))
      agg.upper_bound = s.upper_bound;
  }
  if (agg.zero_count && s.zero_count) *agg.zero_count += *s.zero_count;
  if (agg.true_count && s.true_count) *agg.true_count += *s.true_count;
  if (s.sum) agg.sum_terms.emplace_back(file_path, *s.sum);
}

void aggregate_combine(AggregatedColumnStats& agg, const AggregatedColumnStats& other) {
  bool first = agg.record_count == 0 && agg.value_count == 0 && agg.sum_terms.empty();
  if (first) {
    agg.column_id = other.column_id;
    agg.has_sum = other.has_sum;
    agg.zero_count = other.zero_count ? std::optional<uint64_t>(0) : std::nullopt;
    agg.true_count = other.true_count ? std::optional<uint64_t>(0) : std::nullopt;
  }
  agg.record_count += other.record_count;
  agg.value_count += other.value_count;
  agg.null_count += other.null_count;
  agg.nan_count += other.nan_count;
  agg.column_size_bytes += other.column_size_bytes;
  if (other.lower_bound) {
    ValueKind k = std::holds_alternative<std::string>(*other.lower_bound) ? ValueKind::kString
                  : std::holds_alternative<double>(*other.lower_bound)    ? ValueKind::kFloat64
                  : std::holds_alternative<bool>(*other.lower_bound)      ? ValueKind::kBool
                                                                          : ValueKind::kInt64;
    if (!agg.lower_bound || compare_values(*other.lower_bound, *agg.lower_bound, k) < 0)
      agg.lower_bound = other.lower_bound;
    if (other.upper_bound &&
        (!agg.upper_bound || compare_values(*other.upper_bound, *agg.upper_bound, k) > 0))
      agg.upper_bound = other.upper_bound;
  }
  if (agg.zero_count && other.zero_count) *agg.zero_count += *other.zero_count;
  if (agg.true_count && other.true_count) *agg.true_count += *other.true_count;
  agg.sum_terms.insert(agg.sum_terms.end(), other.sum_terms.begin(), other.sum_terms.end());
}

}  // namespace lakedq
