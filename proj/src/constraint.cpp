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

#include "lakedq/constraint.hpp"

#include <set>

#include "lakedq/errors.hpp"

namespace lakedq {

namespace {

const std::set<std::string> kAggregateCalls = {"null_count", "nan_count", "min",       "max",
                                               "sum",        "zero_count", "true_count"};
const std::set<std::string> kBareTerms = {"record_count", "commit_ts", "now"};

// Rule-grammar names that are deliberately not evaluable at commit time.
const char* rejected_term_hint(const std::string& name) {
  if (name == "distinct") return "needs a theta sketch";
  if (name == "median" || name == "percentile" || name == "iqr") return "needs a kll sketch";
  if (name == "expr") return "needs a data scan";
  if (name == "count" || name == "notNull" || name == "compare" || name == "mean" ||
      name == "zeroCount" || name == "trueCount" || name == "freshness") {
    return "is rule syntax, not a constraint term";
  }
  return nullptr;
}

void validate_node(const dsl::Expr& e, const TableSchema& schema,
                   std::map<std::string, uint32_t>& column_ids) {
  using Kind = dsl::Expr::Kind;
  switch (e.kind) {
    case Kind::kNumber:
      return;
    case Kind::kVar:
      if (!kBareTerms.count(e.name)) {
        if (const char* hint = rejected_term_hint(e.name)) {
          throw ConfigError("constraint term '" + e.name + "' " + hint);
        }
        throw ConfigError("unknown constraint term '" + e.name + "'");
      }
      return;
    case Kind::kCall: {
      if (!kAggregateCalls.count(e.name)) {
        if (const char* hint = rejected_term_hint(e.name)) {
          throw ConfigError("constraint term '" + e.name + "' " + hint);
        }
        throw ConfigError("unknown constraint function '" + e.name + "'");
      }
      if (e.args.size() != 1 || e.args[0].kind != Kind::kVar) {
        throw SyntaxError(e.name + " takes one column name", e.pos);
      }
      const std::string& col_name = e.args[0].name;
      const ColumnSchema& col = schema.by_name(col_name);
      if ((e.name == "sum" || e.name == "zero_count") && !kind_is_numeric(col.kind)) {
        throw ConfigError(e.name + "(" + col_name + ") needs a numeric column");
      }
      if (e.name == "true_count" && col.kind != ValueKind::kBool) {
        throw ConfigError("true_count(" + col_name + ") needs a bool column");
      }
      if ((e.name == "min" || e.name == "max") && col.kind == ValueKind::kString) {
        throw ConfigError(e.name + "(" + col_name +
                          ") is not numerically comparable on a string column");
      }
      if (e.name == "nan_count" && col.kind != ValueKind::kFloat64) {
        throw ConfigError("nan_count(" + col_name + ") needs a float64 column");
      }
      column_ids[col_name] = col.column_id;
      return;
    }
    case Kind::kNegate:
    case Kind::kBinary:
    case Kind::kCompare:
      for (const auto& a : e.args) validate_node(a, schema, column_ids);
      return;
  }
}

std::string repr(const std::optional<double>& v, const std::string& reason) {
  if (v) return format_double(*v);
  return reason.empty() ? "unavailable" : reason;
}

}  // namespace

StatsProvider::StatsProvider(const std::vector<DataFileEntry>& files,
                             uint64_t positional_deletes)
    : files_(files), deletes_(positional_deletes), base_count_(total_record_count(files)) {}

const AggregatedColumnStats& StatsProvider::column(uint32_t column_id) const {
  auto it = cache_.find(column_id);
  if (it == cache_.end()) {
    it = cache_.emplace(column_id, aggregate_stats(files_, column_id)).first;
  }
  return it->second;
}

Constraint Constraint::parse(const ConstraintDef& def, const TableSchema& schema) {
  if (def.scope != kScopeWholeTable && def.scope != kScopePerCommitDelta) {
    throw ConfigError("constraint scope must be whole-table or per-commit-delta");
  }
  dsl::Parser parser(dsl::tokenize(def.expression));
  Constraint c;
  c.def_ = def;
  c.expr_ = parser.parse_comparison();
  parser.expect_end();
  validate_node(c.expr_, schema, c.column_ids_);
  return c;
}

void Constraint::enforce(const StatsProvider& stats, int64_t commit_ts, int64_t now) const {
  std::string reason;
  dsl::Resolver resolve = [&](const dsl::Expr& leaf,
                              std::string* why) -> std::optional<double> {
    auto miss = [&](const std::string& what) -> std::optional<double> {
      if (why && why->empty()) *why = "EmptyAggregate: " + what;
      return std::nullopt;
    };
    if (leaf.kind == dsl::Expr::Kind::kVar) {
      if (leaf.name == "record_count") return static_cast<double>(stats.corrected_record_count());
      if (leaf.name == "commit_ts") return static_cast<double>(commit_ts);
      if (leaf.name == "now") return static_cast<double>(now);
      return miss("term " + leaf.name);
    }
    const std::string& col_name = leaf.args[0].name;
    uint32_t column_id = column_ids_.at(col_name);
    const AggregatedColumnStats* agg = nullptr;
    try {
      agg = &stats.column(column_id);
    } catch (const MissingStatsError& e) {
      if (why && why->empty()) *why = std::string("MissingStats: ") + e.what();
      return std::nullopt;
    }
    const std::string& fn = leaf.name;
    if (fn == "null_count") return static_cast<double>(agg->null_count);
    if (fn == "nan_count") return static_cast<double>(agg->nan_count);
    if (fn == "sum") {
      auto s = agg->sum();
      if (!s) return miss("sum(" + col_name + ") over no values");
      return *s;
    }
    if (fn == "zero_count") {
      if (!agg->zero_count) return miss("zero_count(" + col_name + ") over no values");
      return static_cast<double>(*agg->zero_count);
    }
    if (fn == "true_count") {
      if (!agg->true_count) return miss("true_count(" + col_name + ") over no values");
      return static_cast<double>(*agg->true_count);
    }
    const std::optional<Value>& bound = fn == "min" ? agg->lower_bound : agg->upper_bound;
    if (!bound) return miss(fn + "(" + col_name + ") over no values");
    // strings rejected at registration; remaining kinds all widen
    if (const auto* i = std::get_if<int64_t>(&*bound)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&*bound)) return *d;
    if (const auto* b = std::get_if<bool>(&*bound)) return *b ? 1.0 : 0.0;
    return miss(fn + "(" + col_name + ") bound has no numeric view");
  };

  auto lhs = dsl::evaluate(expr_.args[0], resolve, &reason);
  auto rhs = dsl::evaluate(expr_.args[1], resolve, &reason);
  if (!lhs || !rhs) {
    throw ConstraintViolationError(def_.constraint_id, repr(lhs, reason), repr(rhs, reason),
                                   reason.empty() ? "unevaluatable" : reason);
  }
  if (!dsl::cmp_apply(expr_.cmp, *lhs, *rhs)) {
    throw ConstraintViolationError(def_.constraint_id, format_double(*lhs),
                                   std::string(dsl::cmp_name(expr_.cmp)) + " " +
                                       format_double(*rhs),
                                   "");
  }
}

std::vector<Constraint> parse_constraints(const std::vector<ConstraintDef>& defs,
                                          const TableSchema& schema) {
  std::vector<Constraint> out;
  out.reserve(defs.size());
  for (const auto& def : defs) out.push_back(Constraint::parse(def, schema));
  return out;
}

}  // namespace lakedq
