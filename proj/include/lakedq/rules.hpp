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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lakedq/dsl.hpp"
#include "lakedq/table.hpp"

namespace lakedq {

// What a rule needs in order to be answered without opening data files.
// The tier is a pure function of the rule body.
enum class RuleTier {
  kBaseManifest,    // count, notNull, min, max
  kManifestCompare, // compare(metric, reference, tolerance)
  kCounterExt,      // sum, mean, zeroCount, trueCount
  kTheta,           // distinct
  kKll,             // median, percentile, iqr
  kFreshness,       // freshness(duration)
  kScanRequired,    // expr(...)
};

const char* tier_name(RuleTier t);
bool tier_is_zero_scan(RuleTier t);

enum class Verdict { kPass, kFail, kIndeterminate };
const char* verdict_name(Verdict v);

enum class MetricKind {
  kCount,
  kMin,
  kMax,
  kSum,
  kMean,
  kZeroCount,
  kTrueCount,
  kDistinct,
  kMedian,
  kPercentile,
  kIqr,
};

struct Metric {
  MetricKind kind = MetricKind::kCount;
  std::string column;  // empty for count
  double quantile = 0;  // percentile only
};

struct Rule {
  enum class Form { kMetricCmp, kNotNull, kCompare, kFreshness, kExpr };

  std::string rule_id;
  std::optional<std::string> partition;  // nullopt scopes the whole table
  std::string text;
  RuleTier tier = RuleTier::kBaseManifest;
  Form form = Form::kMetricCmp;

  Metric metric;                   // kMetricCmp, kCompare
  dsl::CmpOp cmp = dsl::CmpOp::kLt;
  double bound = 0;                // numeric bound or notNull fraction
  std::optional<std::string> string_bound;  // min/max vs string literal
  std::string reference;           // kCompare: prev_snapshot | prev_partition
  double tolerance = 0;            // kCompare
  bool absolute_tolerance = false;
  int64_t freshness_micros = 0;
  std::string expr_text;           // kExpr body, verbatim
  dsl::Expr expr_parsed;           // kExpr body for the scan fallback
};

struct RuleResult {
  std::string rule_id;
  Verdict verdict = Verdict::kIndeterminate;
  std::string observed;  // scalar, interval or empty when unknown
  std::optional<double> observed_value;
  std::string bound;
  std::string evaluated_from = "metadata";  // metadata | sketch | scan
  uint64_t snapshot_id = 0;
  std::string reason;  // filled for INDETERMINATE
};

nlohmann::json rule_result_to_json(const RuleResult& r);

// Parses the body text and classifies it. Validates column existence and
// metric / column-type applicability. rule_id and partition are set by the
// caller.
Rule parse_rule(const std::string& text, const TableSchema& schema);

struct EvalOptions {
  std::optional<int64_t> now;  // freshness reference; defaults to wall clock
  // When set, expr(...) rules run through this instead of returning
  // INDETERMINATE. Wired to the scan oracle by the CLI.
  std::function<RuleResult(const Rule&, uint64_t snapshot_id)> scan_fallback;
};

// Answers the rule at a snapshot from manifests and sidecars alone. Every
// non-scan tier runs under the open-counter guard, so a regression that
// touches a data file throws instead of passing silently.
RuleResult evaluate_rule(const Rule& rule, const TableDir& dir, const TableMetadata& meta,
                         uint64_t snapshot_id, const EvalOptions& options = {});

// Exact row count under merge-on-read: base records minus positional
// deletes.
uint64_t corrected_record_count(const std::vector<DataFileEntry>& entries,
                                const std::vector<DeleteFileEntry>& deletes);

struct CoverageReport {
  std::map<RuleTier, size_t> histogram;
  size_t total = 0;
  double zero_scan_fraction = 0;  // 1 - scan-required share; 0 for no rules
};

CoverageReport coverage_report(const std::vector<Rule>& rules);

// rules.dq line format: rule_id TAB partition-or-* TAB body text.
struct StoredRule {
  std::string rule_id;
  std::optional<std::string> partition;
  std::string text;
};

void add_rule(const TableDir& dir, const TableSchema& schema, const StoredRule& rule);
std::vector<StoredRule> load_rules(const TableDir& dir);

}  // namespace lakedq
