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

#include "lakedq/rules.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lakedq/io_counter.hpp"
#include "lakedq/kll_sketch.hpp"
#include "lakedq/sketch_merge.hpp"
#include "lakedq/stats.hpp"
#include "lakedq/theta_sketch.hpp"

namespace lakedq {

const char* tier_name(RuleTier t) {
  switch (t) {
    case RuleTier::kBaseManifest: return "base-manifest";
    case RuleTier::kManifestCompare: return "manifest-compare";
    case RuleTier::kCounterExt: return "counter-ext";
    case RuleTier::kTheta: return "theta";
    case RuleTier::kKll: return "kll";
    case RuleTier::kFreshness: return "freshness";
    case RuleTier::kScanRequired: return "scan-required";
  }
  return "?";
}

bool tier_is_zero_scan(RuleTier t) { return t != RuleTier::kScanRequired; }

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kIndeterminate: return "INDETERMINATE";
  }
  return "?";
}

nlohmann::json rule_result_to_json(const RuleResult& r) {
  nlohmann::json j{{"rule", r.rule_id},
                   {"verdict", verdict_name(r.verdict)},
                   {"observed", r.observed},
                   {"bound", r.bound},
                   {"from", r.evaluated_from},
                   {"snapshot", r.snapshot_id}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

namespace {

struct MetricNames {
  const char* name;
  MetricKind kind;
};

constexpr MetricNames kMetricNames[] = {
    {"min", MetricKind::kMin},           {"max", MetricKind::kMax},
    {"sum", MetricKind::kSum},           {"mean", MetricKind::kMean},
    {"zeroCount", MetricKind::kZeroCount}, {"trueCount", MetricKind::kTrueCount},
    {"distinct", MetricKind::kDistinct}, {"median", MetricKind::kMedian},
    {"percentile", MetricKind::kPercentile}, {"iqr", MetricKind::kIqr},
};

std::optional<MetricKind> metric_from_name(const std::string& name) {
  if (name == "count") return MetricKind::kCount;
  for (const auto& m : kMetricNames)
    if (name == m.name) return m.kind;
  return std::nullopt;
}

const char* metric_name(MetricKind k) {
  if (k == MetricKind::kCount) return "count";
  for (const auto& m : kMetricNames)
    if (k == m.kind) return m.name;
  return "?";
}

// The column-typed applicability of each metric. Throws ConfigError.
void check_metric_column(const Metric& m, const TableSchema& schema) {
  if (m.kind == MetricKind::kCount) return;
  const ColumnSchema& col = schema.by_name(m.column);
  switch (m.kind) {
    case MetricKind::kMin:
    case MetricKind::kMax:
      return;  // every kind carries bounds
    case MetricKind::kSum:
    case MetricKind::kMean:
    case MetricKind::kZeroCount:
      if (!kind_is_numeric(col.kind))
        throw ConfigError(std::string(metric_name(m.kind)) + "(" + m.column +
                          ") needs a numeric column");
      return;
    case MetricKind::kTrueCount:
      if (col.kind != ValueKind::kBool)
        throw ConfigError("trueCount(" + m.column + ") needs a bool column");
      return;
    case MetricKind::kDistinct:
      if (!theta_eligible(col.kind))
        throw ConfigError("distinct(" + m.column + ") needs an id, label or timestamp column");
      return;
    case MetricKind::kMedian:
    case MetricKind::kPercentile:
    case MetricKind::kIqr:
      if (!kll_eligible(col.kind))
        throw ConfigError(std::string(metric_name(m.kind)) + "(" + m.column +
                          ") needs a numeric column");
      return;
    case MetricKind::kCount:
      return;
  }
}

RuleTier classify_metric(MetricKind k) {
  switch (k) {
    case MetricKind::kCount:
    case MetricKind::kMin:
    case MetricKind::kMax:
      return RuleTier::kBaseManifest;
    case MetricKind::kSum:
    case MetricKind::kMean:
    case MetricKind::kZeroCount:
    case MetricKind::kTrueCount:
      return RuleTier::kCounterExt;
    case MetricKind::kDistinct:
      return RuleTier::kTheta;
    case MetricKind::kMedian:
    case MetricKind::kPercentile:
    case MetricKind::kIqr:
      return RuleTier::kKll;
  }
  return RuleTier::kBaseManifest;
}

Metric parse_metric(dsl::Parser& p, const TableSchema& schema) {
  const dsl::Token& t = p.peek();
  if (t.kind != dsl::TokKind::kIdent)
    throw SyntaxError("expected a metric name", t.pos);
  auto kind = metric_from_name(t.text);
  if (!kind) throw SyntaxError("unknown metric " + t.text, t.pos);
  p.get();
  Metric m;
  m.kind = *kind;
  if (m.kind == MetricKind::kCount) return m;
  p.expect_op("(");
  const dsl::Token& col = p.get();
  if (col.kind != dsl::TokKind::kIdent)
    throw SyntaxError("expected a column name", col.pos);
  m.column = col.text;
  if (m.kind == MetricKind::kPercentile) {
    p.expect_op(",");
    const dsl::Token& q = p.get();
    if (q.kind != dsl::TokKind::kNumber)
      throw SyntaxError("percentile needs a rank in [0,1]", q.pos);
    if (q.number < 0.0 || q.number > 1.0)
      throw SyntaxError("percentile rank out of [0,1]", q.pos);
    m.quantile = q.number;
  }
  p.expect_op(")");
  check_metric_column(m, schema);
  return m;
}

dsl::CmpOp parse_cmp(dsl::Parser& p) {
  const dsl::Token& t = p.get();
  if (t.kind == dsl::TokKind::kOp)
    if (auto op = dsl::cmp_from_text(t.text)) return *op;
  throw SyntaxError("expected a comparison operator", t.pos);
}

// expr(...) keeps its body verbatim; parens balance, single-quoted strings
// may contain parens.
std::optional<std::string> capture_expr_body(const std::string& text) {
  size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (text.compare(i, 4, "expr") != 0) return std::nullopt;
  i += 4;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i >= text.size() || text[i] != '(') return std::nullopt;
  size_t open = i;
  int depth = 0;
  bool quoted = false;
  for (size_t j = open; j < text.size(); ++j) {
    char c = text[j];
    if (quoted) {
      if (c == '\'') quoted = false;
      continue;
    }
    if (c == '\'') quoted = true;
    else if (c == '(') ++depth;
    else if (c == ')') {
      if (--depth == 0) {
        for (size_t k = j + 1; k < text.size(); ++k)
          if (!std::isspace(static_cast<unsigned char>(text[k])))
            throw SyntaxError("trailing input after expr(...)", k);
        return text.substr(open + 1, j - open - 1);
      }
    }
  }
  throw SyntaxError("unbalanced parentheses in expr(...)", text.size());
}

int64_t parse_duration(dsl::Parser& p) {
  const dsl::Token& t = p.peek();
  if (t.kind == dsl::TokKind::kNumber) {
    p.get();
    return static_cast<int64_t>(t.number);
  }
  if (t.kind == dsl::TokKind::kIdent && t.text == "interval") {
    p.get();
    const dsl::Token& body = p.get();
    if (body.kind != dsl::TokKind::kString)
      throw SyntaxError("interval needs a quoted body", body.pos);
    return static_cast<int64_t>(dsl::parse_interval_body(body.text, body.pos));
  }
  throw SyntaxError("expected a duration", t.pos);
}

std::string fmt(double v) { return format_double(v); }

RuleResult indeterminate(RuleResult res, const std::string& reason) {
  res.verdict = Verdict::kIndeterminate;
  res.reason = reason;
  return res;
}

RuleResult decided(RuleResult res, bool pass) {
  res.verdict = pass ? Verdict::kPass : Verdict::kFail;
  return res;
}

// A conservative range for a string column's true min or max, rebuilt from
// per-file bounds because 16-byte truncation loses exactness that the
// folded aggregate cannot recover.
struct StringRange {
  std::optional<std::string> lo;  // true value >= lo
  std::optional<std::string> hi;  // true value <= hi, when known
  bool empty = true;              // no non-null value in any live file
};

StringRange string_min_range(const std::vector<DataFileEntry>& files, uint32_t column_id) {
  StringRange r;
  bool exact = false;
  for (const auto& f : files) {
    const ColumnStats* s = f.find_stats(column_id);
    if (!s) throw MissingStatsError(column_id, f.file_path);
    if (!s->lower_bound) continue;  // no values in this file
    r.empty = false;
    const std::string& b = std::get<std::string>(*s->lower_bound);
    bool b_exact = b.size() < kStringBoundPrefixBytes;
    if (!r.lo || b < *r.lo || (b == *r.lo && b_exact)) {
      r.lo = b;
      exact = b_exact;
    }
  }
  if (r.empty || !r.lo) return r;
  if (exact) {
    r.hi = r.lo;
    return r;
  }
  // Maybe-truncated prefix: the true min lies in [lo, incr(lo)]; the
  // increment overflows only on a 0xFF tail byte.
  std::string sup = *r.lo;
  if (static_cast<unsigned char>(sup.back()) != 0xFF) {
    sup.back() = static_cast<char>(static_cast<unsigned char>(sup.back()) + 1);
    r.hi = sup;
  }
  return r;
}

StringRange string_max_range(const std::vector<DataFileEntry>& files, uint32_t column_id) {
  StringRange r;
  bool hi_known = true;
  std::optional<std::string> hi;
  for (const auto& f : files) {
    const ColumnStats* s = f.find_stats(column_id);
    if (!s) throw MissingStatsError(column_id, f.file_path);
    bool has_values = s->value_count > s->null_count;
    if (!has_values) continue;
    r.empty = false;
    if (!s->upper_bound) {
      // Truncation overflow (0xFF prefix): this file's max has no stored
      // ceiling. Its lower bound still floors the table max.
      hi_known = false;
      if (s->lower_bound) {
        const std::string& b = std::get<std::string>(*s->lower_bound);
        if (!r.lo || b > *r.lo) r.lo = b;
      }
      continue;
    }
    const std::string& u = std::get<std::string>(*s->upper_bound);
    bool u_exact = u.size() < kStringBoundPrefixBytes;
    std::string floor = u;
    if (!u_exact) {
      // A full-width bound is either the exact max or an incremented
      // prefix; one byte down is safe either way, except that a 0x00 tail
      // cannot be an increment, so the bound is exact.
      unsigned char last = static_cast<unsigned char>(floor.back());
      if (last == 0x00) u_exact = true;
      else floor.back() = static_cast<char>(last - 1);
    }
    if (!r.lo || floor > *r.lo) r.lo = floor;
    if (!hi || u > *hi) hi = u;
    (void)u_exact;
  }
  if (hi_known) r.hi = hi;
  return r;
}

// Three-valued comparison of every value in [lo, hi] against a literal.
Verdict interval_cmp_string(const StringRange& r, dsl::CmpOp op, const std::string& bound) {
  if (!r.lo) return Verdict::kIndeterminate;
  const std::string& lo = *r.lo;
  const bool has_hi = r.hi.has_value();
  auto all = [&]() -> bool {
    switch (op) {
      case dsl::CmpOp::kGe: return lo >= bound;
      case dsl::CmpOp::kGt: return lo > bound;
      case dsl::CmpOp::kLe: return has_hi && *r.hi <= bound;
      case dsl::CmpOp::kLt: return has_hi && *r.hi < bound;
      case dsl::CmpOp::kEq: return has_hi && lo == bound && *r.hi == bound;
      case dsl::CmpOp::kNe: return (has_hi && *r.hi < bound) || lo > bound;
    }
    return false;
  };
  auto none = [&]() -> bool {
    switch (op) {
      case dsl::CmpOp::kGe: return has_hi && *r.hi < bound;
      case dsl::CmpOp::kGt: return has_hi && *r.hi <= bound;
      case dsl::CmpOp::kLe: return lo > bound;
      case dsl::CmpOp::kLt: return lo >= bound;
      case dsl::CmpOp::kEq: return lo > bound || (has_hi && *r.hi < bound);
      case dsl::CmpOp::kNe: return has_hi && lo == bound && *r.hi == bound;
    }
    return false;
  };
  if (all()) return Verdict::kPass;
  if (none()) return Verdict::kFail;
  return Verdict::kIndeterminate;
}

std::string string_range_repr(const StringRange& r) {
  if (!r.lo) return "(empty)";
  if (r.hi && *r.hi == *r.lo) return "'" + *r.lo + "'";
  return "['" + *r.lo + "', " + (r.hi ? "'" + *r.hi + "'" : "?") + "]";
}

// Numeric-valued metric over one live scope; nullopt with a reason when the
// stats cannot answer it.
std::optional<double> metric_value(const Metric& m, const TableDir& dir, const Manifest& live,
                                   const TableSchema& schema, std::string* reason) {
  bool mor = !live.delete_files.empty();
  if (m.kind == MetricKind::kCount)
    return static_cast<double>(corrected_record_count(live.data_files, live.delete_files));
  if (mor) {
    // Positional deletes correct only the row count; every other statistic
    // still describes the base files.
    *reason = std::string(metric_name(m.kind)) +
              " is uncorrected under merge-on-read; compact first";
    return std::nullopt;
  }
  const ColumnSchema& col = schema.by_name(m.column);
  switch (m.kind) {
    case MetricKind::kMin:
    case MetricKind::kMax: {
      AggregatedColumnStats agg = aggregate_stats(live.data_files, col.column_id);
      const std::optional<Value>& b =
          m.kind == MetricKind::kMin ? agg.lower_bound : agg.upper_bound;
      if (!b) {
        *reason = "empty aggregate: no values for " + m.column;
        return std::nullopt;
      }
      return value_as_double(*b, col.kind);
    }
    case MetricKind::kSum: {
      AggregatedColumnStats agg = aggregate_stats(live.data_files, col.column_id);
      if (!agg.has_sum) {
        *reason = "no sum counter for " + m.column;
        return std::nullopt;
      }
      return agg.sum();
    }
    case MetricKind::kMean: {
      AggregatedColumnStats agg = aggregate_stats(live.data_files, col.column_id);
      uint64_t values = agg.value_count - agg.null_count;
      if (!agg.has_sum || values == 0) {
        *reason = "mean undefined: no non-null values for " + m.column;
        return std::nullopt;
      }
      return *agg.sum() / static_cast<double>(values);
    }
    case MetricKind::kZeroCount: {
      AggregatedColumnStats agg = aggregate_stats(live.data_files, col.column_id);
      if (!agg.zero_count) {
        *reason = "no zero counter for " + m.column;
        return std::nullopt;
      }
      return static_cast<double>(*agg.zero_count);
    }
    case MetricKind::kTrueCount: {
      AggregatedColumnStats agg = aggregate_stats(live.data_files, col.column_id);
      if (!agg.true_count) {
        *reason = "no true counter for " + m.column;
        return std::nullopt;
      }
      return static_cast<double>(*agg.true_count);
    }
    case MetricKind::kDistinct: {
      ThetaSketch merged = merged_theta_for_column(dir, live.data_files, col.column_id);
      return merged.estimate();
    }
    case MetricKind::kMedian:
    case MetricKind::kPercentile:
    case MetricKind::kIqr: {
      KllSketch merged = merged_kll_for_column(dir, live.data_files, col.column_id);
      if (merged.n() == 0) {
        *reason = "empty aggregate: no values for " + m.column;
        return std::nullopt;
      }
      if (m.kind == MetricKind::kIqr) return merged.quantile(0.75) - merged.quantile(0.25);
      double q = m.kind == MetricKind::kMedian ? 0.5 : m.quantile;
      return merged.quantile(q);
    }
    case MetricKind::kCount:
      break;
  }
  return std::nullopt;
}

}  // namespace

Rule parse_rule(const std::string& text, const TableSchema& schema) {
  Rule rule;
  rule.text = text;

  if (auto body = capture_expr_body(text)) {
    rule.form = Rule::Form::kExpr;
    rule.tier = RuleTier::kScanRequired;
    rule.expr_text = *body;
    dsl::Parser p(dsl::tokenize(*body));
    rule.expr_parsed = p.parse_comparison();
    p.expect_end();
    // Row predicates name columns directly; calls have no meaning here.
    std::function<void(const dsl::Expr&)> walk = [&](const dsl::Expr& e) {
      if (e.kind == dsl::Expr::Kind::kCall)
        throw SyntaxError("expr(...) compares row values, not aggregates", e.pos);
      if (e.kind == dsl::Expr::Kind::kVar) schema.by_name(e.name);
      for (const auto& a : e.args) walk(a);
    };
    walk(rule.expr_parsed);
    return rule;
  }

  dsl::Parser p(dsl::tokenize(text));
  const dsl::Token& head = p.peek();
  if (head.kind != dsl::TokKind::kIdent)
    throw SyntaxError("expected a rule keyword or metric", head.pos);

  if (head.text == "notNull") {
    p.get();
    p.expect_op("(");
    const dsl::Token& col = p.get();
    if (col.kind != dsl::TokKind::kIdent)
      throw SyntaxError("expected a column name", col.pos);
    schema.by_name(col.text);
    p.expect_op(",");
    p.expect_op("<");
    const dsl::Token& pct = p.get();
    if (pct.kind != dsl::TokKind::kNumber)
      throw SyntaxError("expected a null-fraction bound", pct.pos);
    double bound = pct.number;
    if (p.accept_op("%")) bound /= 100.0;
    if (bound < 0.0 || bound > 1.0)
      throw SyntaxError("null-fraction bound out of [0,1]", pct.pos);
    p.expect_op(")");
    p.expect_end();
    rule.form = Rule::Form::kNotNull;
    rule.tier = RuleTier::kBaseManifest;
    rule.metric.column = col.text;
    rule.cmp = dsl::CmpOp::kLt;
    rule.bound = bound;
    return rule;
  }

  if (head.text == "compare") {
    p.get();
    p.expect_op("(");
    Metric m = parse_metric(p, schema);
    if (m.kind == MetricKind::kDistinct || m.kind == MetricKind::kMedian ||
        m.kind == MetricKind::kPercentile || m.kind == MetricKind::kIqr)
      throw SyntaxError("compare(...) works on manifest metrics only", head.pos);
    if ((m.kind == MetricKind::kMin || m.kind == MetricKind::kMax) &&
        schema.by_name(m.column).kind == ValueKind::kString)
      throw SyntaxError("compare(...) needs a numeric metric", head.pos);
    p.expect_op(",");
    const dsl::Token& ref = p.get();
    if (ref.kind != dsl::TokKind::kIdent ||
        (ref.text != "prev_snapshot" && ref.text != "prev_partition"))
      throw SyntaxError("reference must be prev_snapshot or prev_partition", ref.pos);
    p.expect_op(",");
    const dsl::Token& tol = p.get();
    if (tol.kind != dsl::TokKind::kNumber || tol.number < 0)
      throw SyntaxError("expected a non-negative tolerance", tol.pos);
    bool absolute = false;
    if (p.accept_op(",")) {
      const dsl::Token& mode = p.get();
      if (mode.kind != dsl::TokKind::kIdent || mode.text != "abs")
        throw SyntaxError("the fourth argument of compare is 'abs'", mode.pos);
      absolute = true;
    }
    p.expect_op(")");
    p.expect_end();
    rule.form = Rule::Form::kCompare;
    rule.tier = RuleTier::kManifestCompare;
    rule.metric = m;
    rule.reference = ref.text;
    rule.tolerance = tol.number;
    rule.absolute_tolerance = absolute;
    return rule;
  }

  if (head.text == "freshness") {
    p.get();
    p.expect_op("(");
    int64_t dur = parse_duration(p);
    if (dur <= 0) throw SyntaxError("freshness needs a positive duration", head.pos);
    p.expect_op(")");
    p.expect_end();
    rule.form = Rule::Form::kFreshness;
    rule.tier = RuleTier::kFreshness;
    rule.freshness_micros = dur;
    return rule;
  }

  Metric m = parse_metric(p, schema);
  dsl::CmpOp cmp = parse_cmp(p);
  const dsl::Token& b = p.get();
  rule.form = Rule::Form::kMetricCmp;
  rule.metric = m;
  rule.cmp = cmp;
  bool string_metric = (m.kind == MetricKind::kMin || m.kind == MetricKind::kMax) &&
                       schema.by_name(m.column).kind == ValueKind::kString;
  if (b.kind == dsl::TokKind::kNumber && !string_metric) {
    rule.bound = b.number;
  } else if (b.kind == dsl::TokKind::kString && string_metric) {
    rule.string_bound = b.text;
  } else if (string_metric) {
    throw SyntaxError("string column bounds compare against a quoted literal", b.pos);
  } else {
    throw SyntaxError("expected a numeric bound", b.pos);
  }
  p.expect_end();
  rule.tier = classify_metric(m.kind);
  return rule;
}

uint64_t corrected_record_count(const std::vector<DataFileEntry>& entries,
                                const std::vector<DeleteFileEntry>& deletes) {
  uint64_t n = total_record_count(entries);
  for (const auto& d : deletes) n -= d.delete_count;
  return n;
}

RuleResult evaluate_rule(const Rule& rule, const TableDir& dir, const TableMetadata& meta,
                         uint64_t snapshot_id, const EvalOptions& options) {
  RuleResult res;
  res.rule_id = rule.rule_id;
  res.snapshot_id = snapshot_id;

  if (rule.tier == RuleTier::kScanRequired) {
    if (options.scan_fallback) return options.scan_fallback(rule, snapshot_id);
    res.evaluated_from = "metadata";
    return indeterminate(std::move(res),
                         "expr(...) needs a scan and the scan fallback is disabled");
  }

  ZeroScanGuard guard("rule " + rule.rule_id);
  res.evaluated_from =
      (rule.tier == RuleTier::kTheta || rule.tier == RuleTier::kKll) ? "sketch" : "metadata";

  Manifest live = live_files(dir, meta, snapshot_id, rule.partition);
  bool mor = !live.delete_files.empty();

  auto finish = [&](RuleResult r) {
    guard.check();
    return r;
  };

  switch (rule.form) {
    case Rule::Form::kFreshness: {
      // Maintenance rewrites move commit_ts without new data; freshness
      // watches user writes only.
      std::optional<int64_t> last;
      for (const auto& s : meta.snapshot_log) {
        if (s.snapshot_id > snapshot_id) break;
        if (!is_maintenance(s.operation)) last = s.commit_ts;
      }
      if (!last) return finish(indeterminate(std::move(res), "no user commits yet"));
      int64_t now = options.now ? *options.now : system_clock_micros()();
      int64_t gap = now - *last;
      res.observed = fmt(static_cast<double>(gap));
      res.observed_value = static_cast<double>(gap);
      res.bound = fmt(static_cast<double>(rule.freshness_micros));
      return finish(decided(std::move(res), gap <= rule.freshness_micros));
    }

    case Rule::Form::kNotNull: {
      res.bound = "< " + fmt(rule.bound);
      if (mor)
        return finish(indeterminate(std::move(res),
                                    "null counts are uncorrected under merge-on-read"));
      const ColumnSchema& col = meta.schema.by_name(rule.metric.column);
      AggregatedColumnStats agg;
      try {
        agg = aggregate_stats(live.data_files, col.column_id);
      } catch (const MissingStatsError& e) {
        return finish(indeterminate(std::move(res), e.what()));
      }
      if (agg.value_count == 0)
        return finish(indeterminate(std::move(res), "empty aggregate: no rows"));
      double frac = static_cast<double>(agg.null_count) / static_cast<double>(agg.value_count);
      res.observed = fmt(frac);
      res.observed_value = frac;
      return finish(decided(std::move(res), frac < rule.bound));
    }

    case Rule::Form::kMetricCmp: {
      if (rule.string_bound) {
        res.bound = "'" + *rule.string_bound + "'";
        if (mor)
          return finish(indeterminate(std::move(res),
                                      "string bounds are uncorrected under merge-on-read"));
        const ColumnSchema& col = meta.schema.by_name(rule.metric.column);
        StringRange range;
        try {
          range = rule.metric.kind == MetricKind::kMin
                      ? string_min_range(live.data_files, col.column_id)
                      : string_max_range(live.data_files, col.column_id);
        } catch (const MissingStatsError& e) {
          return finish(indeterminate(std::move(res), e.what()));
        }
        if (range.empty)
          return finish(
              indeterminate(std::move(res), "empty aggregate: no values for " + col.name));
        res.observed = string_range_repr(range);
        Verdict v = interval_cmp_string(range, rule.cmp, *rule.string_bound);
        if (v == Verdict::kIndeterminate)
          return finish(indeterminate(std::move(res),
                                      "truncated string bounds cannot prove the comparison"));
        res.verdict = v;
        return finish(std::move(res));
      }
      res.bound = std::string(cmp_name(rule.cmp)) + " " + fmt(rule.bound);
      std::string reason;
      std::optional<double> value;
      try {
        value = metric_value(rule.metric, dir, live, meta.schema, &reason);
      } catch (const MissingStatsError& e) {
        return finish(indeterminate(std::move(res), e.what()));
      } catch (const MissingSidecarError& e) {
        return finish(indeterminate(std::move(res), e.what()));
      }
      if (!value) return finish(indeterminate(std::move(res), reason));
      res.observed = fmt(*value);
      res.observed_value = *value;
      return finish(decided(std::move(res), dsl::cmp_apply(rule.cmp, *value, rule.bound)));
    }

    case Rule::Form::kCompare: {
      std::string reason;
      std::optional<double> cur;
      try {
        cur = metric_value(rule.metric, dir, live, meta.schema, &reason);
      } catch (const MissingStatsError& e) {
        return finish(indeterminate(std::move(res), e.what()));
      }
      if (!cur) return finish(indeterminate(std::move(res), reason));

      Manifest ref_live;
      if (rule.reference == "prev_snapshot") {
        if (snapshot_id == 0)
          return finish(indeterminate(std::move(res), "no parent snapshot to compare against"));
        const Snapshot& snap = meta.snapshot(snapshot_id);
        if (!snap.parent_id)
          return finish(indeterminate(std::move(res), "no parent snapshot to compare against"));
        ref_live = live_files(dir, meta, *snap.parent_id, rule.partition);
      } else {
        if (!rule.partition)
          return finish(indeterminate(std::move(res),
                                      "prev_partition needs a partition-scoped rule"));
        Manifest all = live_files(dir, meta, snapshot_id);
        std::set<std::string> keys;
        for (const auto& e : all.data_files) keys.insert(e.partition_key);
        std::optional<std::string> prev;
        for (const auto& k : keys)
          if (k < *rule.partition && (!prev || k > *prev)) prev = k;
        if (!prev)
          return finish(indeterminate(std::move(res), "no previous partition to compare against"));
        ref_live = live_files(dir, meta, snapshot_id, prev);
      }

      std::optional<double> ref;
      try {
        ref = metric_value(rule.metric, dir, ref_live, meta.schema, &reason);
      } catch (const MissingStatsError& e) {
        return finish(indeterminate(std::move(res), e.what()));
      }
      if (!ref)
        return finish(indeterminate(std::move(res), "reference: " + reason));

      res.observed = fmt(*cur);
      res.observed_value = *cur;
      if (rule.absolute_tolerance) {
        res.bound = fmt(*ref) + " +/- " + fmt(rule.tolerance);
        return finish(decided(std::move(res), std::fabs(*cur - *ref) <= rule.tolerance));
      }
      if (*ref == 0.0) {
        // Relative deviation from zero is undefined; only an exact match
        // passes.
        res.bound = "0 (exact)";
        return finish(decided(std::move(res), *cur == 0.0));
      }
      res.bound = fmt(*ref) + " +/- " + fmt(rule.tolerance * 100.0) + "%";
      double rel = std::fabs(*cur - *ref) / std::fabs(*ref);
      return finish(decided(std::move(res), rel <= rule.tolerance));
    }

    case Rule::Form::kExpr:
      break;  // handled above
  }
  return finish(indeterminate(std::move(res), "unreachable rule form"));
}

CoverageReport coverage_report(const std::vector<Rule>& rules) {
  CoverageReport rep;
  for (RuleTier t : {RuleTier::kBaseManifest, RuleTier::kManifestCompare, RuleTier::kCounterExt,
                     RuleTier::kTheta, RuleTier::kKll, RuleTier::kFreshness,
                     RuleTier::kScanRequired})
    rep.histogram[t] = 0;
  for (const auto& r : rules) ++rep.histogram[r.tier];
  rep.total = rules.size();
  if (rep.total == 0) {
    rep.zero_scan_fraction = 1.0;  // vacuously zero-scan
    return rep;
  }
  size_t scans = rep.histogram[RuleTier::kScanRequired];
  rep.zero_scan_fraction =
      1.0 - static_cast<double>(scans) / static_cast<double>(rep.total);
  return rep;
}

void add_rule(const TableDir& dir, const TableSchema& schema, const StoredRule& rule) {
  if (rule.rule_id.empty() || rule.rule_id.find('\t') != std::string::npos ||
      rule.rule_id.find('\n') != std::string::npos)
    throw ConfigError("rule id must be non-empty and tab-free");
  if (rule.partition &&
      (rule.partition->find('\t') != std::string::npos || *rule.partition == "*"))
    throw ConfigError("invalid partition selector");
  if (rule.text.find('\n') != std::string::npos)
    throw ConfigError("rule text must be a single line");
  parse_rule(rule.text, schema);  // reject unparseable rules up front
  for (const auto& existing : load_rules(dir))
    if (existing.rule_id == rule.rule_id)
      throw ConfigError("rule id already registered: " + rule.rule_id);
  std::ofstream f(dir.rules_file(), std::ios::binary | std::ios::app);
  if (!f) throw FileIoError("cannot append rules file");
  f << rule.rule_id << '\t' << (rule.partition ? *rule.partition : "*") << '\t' << rule.text
    << '\n';
  f.flush();
  if (!f) throw FileIoError("rules file append failed");
}

std::vector<StoredRule> load_rules(const TableDir& dir) {
  std::vector<StoredRule> out;
  std::ifstream f(dir.rules_file(), std::ios::binary);
  if (!f) return out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw FormatError("rules.dq line " + std::to_string(lineno) + ": expected 3 fields");
    StoredRule r;
    r.rule_id = line.substr(0, t1);
    std::string part = line.substr(t1 + 1, t2 - t1 - 1);
    if (part != "*") r.partition = part;
    r.text = line.substr(t2 + 1);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lakedq
