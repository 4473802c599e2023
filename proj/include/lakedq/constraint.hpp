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

#include <map>
#include <string>
#include <vector>

#include "lakedq/dsl.hpp"
#include "lakedq/manifest.hpp"
#include "lakedq/table.hpp"

namespace lakedq {

inline constexpr const char* kScopeWholeTable = "whole-table";
inline constexpr const char* kScopePerCommitDelta = "per-commit-delta";

// Lazy per-column aggregation over one live set. record_count correction is
// exact for positional deletes; every other statistic is the base-file
// aggregate, uncorrected until compaction.
class StatsProvider {
 public:
  StatsProvider(const std::vector<DataFileEntry>& files, uint64_t positional_deletes);

  const AggregatedColumnStats& column(uint32_t column_id) const;  // MissingStatsError
  uint64_t base_record_count() const { return base_count_; }
  uint64_t positional_deletes() const { return deletes_; }
  uint64_t corrected_record_count() const { return base_count_ - deletes_; }

 private:
  const std::vector<DataFileEntry>& files_;
  uint64_t deletes_;
  uint64_t base_count_;
  mutable std::map<uint32_t, AggregatedColumnStats> cache_;
};

// A commit-time predicate over manifest aggregates:
//   term := record_count | commit_ts | now
//         | null_count(col) | nan_count(col) | min(col) | max(col)
//         | sum(col) | zero_count(col) | true_count(col)
// combined with + - * /, duration literals (2h, interval '2 hours') and one
// comparison. Registration rejects anything needing sketches or scans.
class Constraint {
 public:
  // Validates grammar, term names, column existence and kind applicability.
  // Throws SyntaxError / UnknownColumnError / ConfigError.
  static Constraint parse(const ConstraintDef& def, const TableSchema& schema);

  const ConstraintDef& def() const { return def_; }

  // Evaluates from aggregates alone; throws ConstraintViolationError when
  // the predicate is false, and also when it cannot be evaluated (empty
  // aggregate, division by zero, missing stats). Fails closed.
  void enforce(const StatsProvider& stats, int64_t commit_ts, int64_t now) const;

 private:
  ConstraintDef def_;
  dsl::Expr expr_;
  std::map<std::string, uint32_t> column_ids_;  // resolved call arguments
};

// Parses and validates every registered constraint once.
std::vector<Constraint> parse_constraints(const std::vector<ConstraintDef>& defs,
                                          const TableSchema& schema);

}  // namespace lakedq
