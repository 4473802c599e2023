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

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lakedq/config.hpp"
#include "lakedq/csv.hpp"
#include "lakedq/errors.hpp"
#include "lakedq/observe.hpp"
#include "lakedq/oracle.hpp"
#include "lakedq/rules.hpp"
#include "lakedq/sketch_merge.hpp"
#include "lakedq/workload.hpp"
#include "lakedq/write_path.hpp"

namespace {

using namespace lakedq;

// Exit codes, stable for CI use: 0 ok, 1 error, 2 rule FAIL,
// 3 constraint violation, 4 INDETERMINATE (unless --lenient).
constexpr int kExitError = 1;
constexpr int kExitRuleFail = 2;
constexpr int kExitConstraint = 3;
constexpr int kExitIndeterminate = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) throw FileIoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int64_t wall_clock_micros() { return system_clock_micros()(); }

// User-supplied CSV with a header row naming schema columns in order.
std::vector<Row> rows_from_csv(const std::string& path, const TableSchema& schema) {
  std::string text = slurp(path);
  csv::Parser parser;
  std::vector<csv::Record> records;
  parser.feed(text, records);
  parser.finish(records);
  if (records.empty()) throw FormatError(path + ": missing header row");
  const csv::Record& header = records.front();
  if (header.size() != schema.size())
    throw FormatError(path + ": header has " + std::to_string(header.size()) +
                      " columns, schema has " + std::to_string(schema.size()));
  for (size_t i = 0; i < schema.size(); ++i) {
    if (header[i].text != schema.column_at(i).name)
      throw FormatError(path + ": header column '" + header[i].text + "' should be '" +
                        schema.column_at(i).name + "'");
  }
  std::vector<Row> rows;
  rows.reserve(records.size() - 1);
  for (size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (rec.size() != schema.size())
      throw FormatError(path + ": row " + std::to_string(r) + " has " +
                        std::to_string(rec.size()) + " fields");
    Row row;
    row.reserve(schema.size());
    for (size_t c = 0; c < schema.size(); ++c)
      row.push_back(parse_value(rec[c].text, rec[c].quoted, schema.column_at(c).kind));
    rows.push_back(std::move(row));
  }
  return rows;
}

TableMetadata open_table(const std::string& root) { return load_table(TableDir(root)); }

int worst_exit(const std::vector<RuleResult>& results, bool lenient) {
  bool fail = false, indet = false;
  for (const auto& r : results) {
    if (r.verdict == Verdict::kFail) fail = true;
    if (r.verdict == Verdict::kIndeterminate) indet = true;
  }
  if (fail) return kExitRuleFail;
  if (indet && !lenient) return kExitIndeterminate;
  return 0;
}

int cmd_init(const std::string& root, const std::string& schema_path, std::string name,
             const std::string& priority_csv) {
  nlohmann::json j = nlohmann::json::parse(slurp(schema_path));
  TableSchema schema = TableSchema::from_json(j);
  if (name.empty()) name = std::filesystem::path(root).filename().string();
  std::vector<uint32_t> priority;
  if (priority_csv.empty()) {
    for (size_t i = 0; i < schema.size() && i < kStatsColumnCap; ++i)
      priority.push_back(schema.column_at(i).column_id);
  } else {
    std::istringstream in(priority_csv);
    std::string tok;
    while (std::getline(in, tok, ','))
      priority.push_back(static_cast<uint32_t>(std::stoul(tok)));
  }
  init_table(TableDir(root), name, schema, priority);
  std::cerr << "initialized " << name << " with " << schema.size() << " columns\n";
  return 0;
}

int cmd_write(const std::string& root, const std::string& partition, const std::string& input,
              bool overwrite, size_t max_rows, const std::string& writer) {
  TableStore store(TableDir(root), writer);
  std::vector<Row> rows = rows_from_csv(input, store.meta().schema);
  WriteBatch batch{partition, std::move(rows)};
  Snapshot snap = overwrite ? store.overwrite(batch, max_rows) : store.append(batch, max_rows);
  std::cout << snapshot_to_json(snap).dump() << "\n";
  return 0;
}

int cmd_delete(const std::string& root, const std::string& partition,
               const std::string& positions_path, const std::string& writer) {
  std::vector<std::pair<std::string, uint64_t>> positions;
  std::istringstream in(slurp(positions_path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    positions.emplace_back(j.at("file").get<std::string>(), j.at("pos").get<uint64_t>());
  }
  TableStore store(TableDir(root), writer);
  Snapshot snap = store.delete_rows(partition, positions);
  std::cout << snapshot_to_json(snap).dump() << "\n";
  return 0;
}

int cmd_compact(const std::string& root, const std::string& partition) {
  TableStore store(TableDir(root), kMaintenanceWriter);
  Snapshot snap = store.compact(partition);
  std::cout << snapshot_to_json(snap).dump() << "\n";
  return 0;
}

int cmd_constraint_add(const std::string& root, const std::string& id, const std::string& expr,
                       const std::string& scope) {
  if (scope != "whole-table" && scope != "per-commit-delta")
    throw ConfigError("scope must be whole-table or per-commit-delta");
  TableStore store{TableDir(root)};
  store.add_constraint(ConstraintDef{id, expr, scope});
  std::cerr << "constraint " << id << " registered\n";
  return 0;
}

int cmd_constraint_list(const std::string& root) {
  TableMetadata meta = open_table(root);
  for (const auto& c : meta.constraints) {
    nlohmann::json j{{"id", c.constraint_id}, {"expr", c.expression}, {"scope", c.scope}};
    std::cout << j.dump() << "\n";
  }
  return 0;
}

int cmd_rules_add(const std::string& root, const std::string& id, const std::string& text,
                  const std::string& partition) {
  TableDir dir(root);
  TableMetadata meta = load_table(dir);
  StoredRule rule{id, partition.empty() ? std::nullopt : std::make_optional(partition), text};
  add_rule(dir, meta.schema, rule);
  std::cerr << "rule " << id << " registered\n";
  return 0;
}

int cmd_rules_list(const std::string& root) {
  std::vector<StoredRule> rules = load_rules(TableDir(root));
  for (const auto& r : rules) {
    nlohmann::json j{{"id", r.rule_id},
                     {"partition", r.partition ? nlohmann::json(*r.partition) : nlohmann::json()},
                     {"rule", r.text}};
    std::cout << j.dump() << "\n";
  }
  return 0;
}

int cmd_rules_eval(const std::string& root, uint64_t snapshot, bool allow_scan, bool lenient,
                   int64_t now) {
  TableDir dir(root);
  TableMetadata meta = load_table(dir);
  if (snapshot == 0) snapshot = meta.current_snapshot_id;
  EvalOptions options;
  options.now = now == 0 ? wall_clock_micros() : now;
  if (allow_scan) {
    options.scan_fallback = [&](const Rule& rule, uint64_t snap) {
      return oracle_rule(rule, dir, meta, snap, options);
    };
  }
  std::vector<RuleResult> results;
  for (const StoredRule& stored : load_rules(dir)) {
    Rule rule = parse_rule(stored.text, meta.schema);
    rule.rule_id = stored.rule_id;
    rule.partition = stored.partition;
    rule.text = stored.text;
    RuleResult res = evaluate_rule(rule, dir, meta, snapshot, options);
    std::cout << rule_result_to_json(res).dump() << "\n";
    results.push_back(std::move(res));
  }
  std::cerr << results.size() << " rules evaluated at snapshot " << snapshot << "\n";
  return worst_exit(results, lenient);
}

int cmd_observe(const std::string& root, bool sweep, int64_t now, const std::string& config_path,
                bool dump_series) {
  TableDir dir(root);
  DetectorConfig cfg = config_path.empty() ? DetectorConfig{}
                                           : load_detector_config(config_path);
  Observer obs(dir, cfg);
  std::vector<Alert> alerts = obs.replay();
  if (sweep) {
    int64_t at = now == 0 ? wall_clock_micros() : now;
    std::vector<Alert> swept = obs.sweep(at);
    alerts.insert(alerts.end(), swept.begin(), swept.end());
  }
  const TableSchema& schema = obs.metadata().schema;
  std::ofstream log(dir.alerts_log(), std::ios::trunc);
  for (const Alert& a : alerts) {
    std::string line = alert_to_json(a, schema).dump();
    log << line << "\n";
    std::cout << line << "\n";
  }
  if (dump_series) {
    for (const auto& [key, points] : obs.series())
      for (const SeriesPoint& p : points)
        std::cout << series_point_to_json(p, schema).dump() << "\n";
  }
  size_t n_points = 0;
  for (const auto& [key, points] : obs.series()) n_points += points.size();
  std::cerr << alerts.size() << " alerts over " << obs.series().size() << " series ("
            << n_points << " points, " << obs.skipped_checks()
            << " checks skipped for history)\n";
  return 0;
}

nlohmann::json coverage_to_json(const CoverageReport& report) {
  nlohmann::json tiers = nlohmann::json::object();
  for (const auto& [tier, n] : report.histogram) tiers[tier_name(tier)] = n;
  return nlohmann::json{{"total", report.total},
                        {"tiers", tiers},
                        {"zero_scan_fraction", report.zero_scan_fraction}};
}

int cmd_coverage(const std::string& target, size_t columns) {
  std::vector<Rule> rules;
  if (std::filesystem::exists(std::filesystem::path(target) / "metadata" / "table.json")) {
    TableDir dir(target);
    TableMetadata meta = load_table(dir);
    for (const StoredRule& stored : load_rules(dir))
      rules.push_back(parse_rule(stored.text, meta.schema));
  } else {
    TableSchema schema = gen_schema(columns);
    std::istringstream in(slurp(target));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      rules.push_back(parse_rule(line, schema));
    }
  }
  std::cout << coverage_to_json(coverage_report(rules)).dump() << "\n";
  return 0;
}

int cmd_validate(const std::string& root, uint64_t snapshot, bool parallel, bool full) {
  TableDir dir(root);
  TableMetadata meta = load_table(dir);
  if (snapshot == 0) snapshot = meta.current_snapshot_id;
  ValidationReport report = validate_snapshot(dir, meta, snapshot, parallel);
  nlohmann::json out{{"snapshot", report.snapshot_id},
                     {"clean", report.clean},
                     {"data_file_opens", report.data_file_opens}};
  if (report.theta_max_rel_error) out["theta_max_rel_error"] = *report.theta_max_rel_error;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    if (e.match && !full) continue;
    entries.push_back(nlohmann::json{{"column", e.column_id},
                                     {"field", e.field},
                                     {"manifest", e.manifest_value},
                                     {"oracle", e.oracle_value},
                                     {"match", e.match}});
  }
  out[full ? "entries" : "mismatches"] = entries;
  std::cout << out.dump() << "\n";
  std::cerr << "validated snapshot " << report.snapshot_id << ": "
            << (report.clean ? "clean" : "MISMATCH") << ", " << report.data_file_opens
            << " data file opens\n";
  return report.clean ? 0 : kExitError;
}

int cmd_gen_table(const std::string& out, uint64_t seed, const std::string& spec_path,
                  const TableGenSpec& flag_spec, const std::vector<bool>& flag_set) {
  TableGenSpec spec = spec_path.empty() ? TableGenSpec{} : parse_table_spec(slurp(spec_path));
  if (flag_set[0]) spec.rows = flag_spec.rows;
  if (flag_set[1]) spec.columns = flag_spec.columns;
  if (flag_set[2]) spec.files = flag_spec.files;
  if (flag_set[3]) spec.partitions = flag_spec.partitions;
  if (flag_set[4]) spec.null_rate = flag_spec.null_rate;
  if (flag_set[5]) spec.table_name = flag_spec.table_name;
  TableDir dir = generate_table(out, seed, spec);
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(directory_hash(dir.root())));
  nlohmann::json j{{"root", dir.root().string()},
                   {"rows", spec.rows},
                   {"columns", spec.columns},
                   {"seed", seed},
                   {"hash", hex}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_gen_incident(const std::string& out, const std::string& name) {
  IncidentFixture fx = replay_incident(out, name);
  nlohmann::json expected = nlohmann::json::array();
  for (const auto& e : fx.expected)
    expected.push_back(nlohmann::json{{"kind", alert_kind_name(e.kind)},
                                      {"snapshot", e.snapshot_id}});
  nlohmann::json j{{"name", fx.name},
                   {"root", fx.table_root.string()},
                   {"sweep_now", fx.sweep_now},
                   {"expected", expected}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_bench_sketch_merge(size_t files, size_t rows_per_file, size_t columns) {
  TableSchema schema = gen_schema(columns);
  std::vector<ColumnSchema> cols(schema.columns().begin(), schema.columns().end());

  std::vector<SketchSidecar> sidecars;
  sidecars.reserve(files);
  uint64_t counter = 0;
  for (size_t f = 0; f < files; ++f) {
    SketchSidecar sc;
    for (const auto& col : cols) {
      std::optional<ThetaSketch> theta;
      std::optional<KllSketch> kll;
      if (theta_eligible(col.kind)) theta.emplace();
      if (kll_eligible(col.kind)) kll.emplace();
      if (!theta && !kll) continue;
      for (size_t r = 0; r < rows_per_file; ++r) {
        uint64_t x = ++counter * 0x9E3779B97F4A7C15ULL;
        if (theta) {
          if (col.kind == ValueKind::kString) {
            theta->update(Value{std::to_string(x)}, col.kind);
          } else {
            theta->update(Value{static_cast<int64_t>(x >> 17)}, col.kind);
          }
        }
        if (kll) kll->update(static_cast<double>(x >> 11) * 0x1.0p-53);
      }
      if (theta) sc.blobs.push_back({kBlobTheta, col.column_id, theta->serialize()});
      if (kll) sc.blobs.push_back({kBlobKll, col.column_id, kll->serialize()});
    }
    sidecars.push_back(std::move(sc));
  }

  auto time_ms = [](auto&& fn) {
    auto best = std::chrono::duration<double, std::milli>::max();
    for (int rep = 0; rep < 3; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      fn();
      auto dt = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
      best = std::min(best, dt);
    }
    return best.count();
  };

  MergedSketches serial, parallel;
  double serial_ms = time_ms([&] { serial = merge_sketches_serial(sidecars, cols); });
  double parallel_ms = time_ms([&] { parallel = merge_sketches_parallel(sidecars, cols); });

  bool identical = serial.theta.size() == parallel.theta.size() &&
                   serial.kll.size() == parallel.kll.size();
  if (identical) {
    for (const auto& [id, sk] : serial.theta)
      identical = identical && parallel.theta.count(id) > 0 &&
                  sk.serialize() == parallel.theta.at(id).serialize();
    for (const auto& [id, sk] : serial.kll)
      identical = identical && parallel.kll.count(id) > 0 &&
                  sk.serialize() == parallel.kll.at(id).serialize();
  }

  nlohmann::json j{{"files", files},
                   {"rows_per_file", rows_per_file},
                   {"columns", columns},
                   {"serial_ms", serial_ms},
                   {"parallel_ms", parallel_ms},
                   {"identical", identical}};
  std::cout << j.dump() << "\n";
  std::cerr << "merged " << files << " sidecars: serial " << serial_ms << " ms, parallel "
            << parallel_ms << " ms, results " << (identical ? "identical" : "DIFFER") << "\n";
  return identical ? 0 : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"table store with zero-scan data quality checks"};
  app.require_subcommand(1);
  int rc = 0;

  // init
  auto* init = app.add_subcommand("init", "create an empty table");
  std::string init_root, init_schema, init_name, init_priority;
  init->add_option("table", init_root, "table directory")->required();
  init->add_option("--schema", init_schema, "JSON column list")->required();
  init->add_option("--name", init_name, "table name (default: directory name)");
  init->add_option("--priority", init_priority, "comma-separated column ids to track stats for");
  init->callback([&] { rc = cmd_init(init_root, init_schema, init_name, init_priority); });

  // write
  auto* write = app.add_subcommand("write", "append or overwrite a partition from CSV");
  std::string w_root, w_partition, w_input, w_writer = "cli-writer";
  bool w_overwrite = false;
  size_t w_max_rows = kDefaultMaxRowsPerFile;
  write->add_option("table", w_root)->required();
  write->add_option("--partition", w_partition, "partition key")->required();
  write->add_option("--input", w_input, "CSV file with header")->required();
  write->add_flag("--overwrite", w_overwrite, "replace the partition instead of appending");
  write->add_option("--max-rows-per-file", w_max_rows, "chunking bound");
  write->add_option("--writer", w_writer, "writer identity recorded in the snapshot");
  write->callback(
      [&] { rc = cmd_write(w_root, w_partition, w_input, w_overwrite, w_max_rows, w_writer); });

  // delete
  auto* del = app.add_subcommand("delete", "merge-on-read positional deletes");
  std::string d_root, d_partition, d_positions, d_writer = "cli-writer";
  del->add_option("table", d_root)->required();
  del->add_option("--partition", d_partition)->required();
  del->add_option("--positions", d_positions, "JSONL lines {\"file\",\"pos\"}")->required();
  del->add_option("--writer", d_writer);
  del->callback([&] { rc = cmd_delete(d_root, d_partition, d_positions, d_writer); });

  // compact
  auto* compact = app.add_subcommand("compact", "rewrite a partition applying its deletes");
  std::string c_root, c_partition;
  compact->add_option("table", c_root)->required();
  compact->add_option("--partition", c_partition)->required();
  compact->callback([&] { rc = cmd_compact(c_root, c_partition); });

  // constraint add|list
  auto* constraint = app.add_subcommand("constraint", "commit-time contracts");
  constraint->require_subcommand(1);
  auto* cadd = constraint->add_subcommand("add", "register a constraint");
  std::string ca_root, ca_id, ca_expr, ca_scope = "whole-table";
  cadd->add_option("table", ca_root)->required();
  cadd->add_option("--id", ca_id)->required();
  cadd->add_option("--expr", ca_expr, "e.g. 'record_count >= 1000'")->required();
  cadd->add_option("--scope", ca_scope, "whole-table | per-commit-delta");
  cadd->callback([&] { rc = cmd_constraint_add(ca_root, ca_id, ca_expr, ca_scope); });
  auto* clist = constraint->add_subcommand("list", "print registered constraints");
  std::string cl_root;
  clist->add_option("table", cl_root)->required();
  clist->callback([&] { rc = cmd_constraint_list(cl_root); });

  // rules add|list|eval
  auto* rules = app.add_subcommand("rules", "quality rules");
  rules->require_subcommand(1);
  auto* radd = rules->add_subcommand("add", "register a rule");
  std::string ra_root, ra_id, ra_text, ra_partition;
  radd->add_option("table", ra_root)->required();
  radd->add_option("--id", ra_id)->required();
  radd->add_option("--rule", ra_text, "rule body, e.g. 'min(age) >= 0'")->required();
  radd->add_option("--partition", ra_partition, "restrict to one partition");
  radd->callback([&] { rc = cmd_rules_add(ra_root, ra_id, ra_text, ra_partition); });
  auto* rlist = rules->add_subcommand("list", "print registered rules");
  std::string rl_root;
  rlist->add_option("table", rl_root)->required();
  rlist->callback([&] { rc = cmd_rules_list(rl_root); });
  auto* reval = rules->add_subcommand("eval", "evaluate rules from metadata");
  std::string re_root;
  uint64_t re_snapshot = 0;
  bool re_allow_scan = false, re_lenient = false;
  int64_t re_now = 0;
  reval->add_option("table", re_root)->required();
  reval->add_option("--snapshot", re_snapshot, "snapshot id (default: current)");
  reval->add_flag("--allow-scan", re_allow_scan, "let expr(...) rules fall back to a full scan");
  reval->add_flag("--lenient", re_lenient, "INDETERMINATE exits 0 instead of 4");
  reval->add_option("--now", re_now, "freshness reference time, micros since epoch");
  reval->callback(
      [&] { rc = cmd_rules_eval(re_root, re_snapshot, re_allow_scan, re_lenient, re_now); });

  // observe
  auto* observe = app.add_subcommand("observe", "replay commit events through the detectors");
  std::string o_root, o_config;
  bool o_sweep = false, o_series = false;
  int64_t o_now = 0;
  observe->add_option("table", o_root)->required();
  observe->add_flag("--sweep", o_sweep, "also run the clock-driven freshness check");
  observe->add_option("--now", o_now, "sweep clock, micros since epoch (default: wall clock)");
  observe->add_option("--config", o_config, "detector config file");
  observe->add_flag("--series", o_series, "also print every series point");
  observe->callback([&] { rc = cmd_observe(o_root, o_sweep, o_now, o_config, o_series); });

  // coverage
  auto* coverage = app.add_subcommand("coverage", "tier histogram and zero-scan fraction");
  std::string cov_target;
  size_t cov_columns = 20;
  coverage->add_option("target", cov_target, "table directory or rule-text file")->required();
  coverage->add_option("--columns", cov_columns,
                       "schema width for classifying a rule-text file");
  coverage->callback([&] { rc = cmd_coverage(cov_target, cov_columns); });

  // validate
  auto* validate = app.add_subcommand("validate", "compare manifest stats against a full scan");
  std::string v_root;
  uint64_t v_snapshot = 0;
  bool v_parallel = false, v_full = false;
  validate->add_option("table", v_root)->required();
  validate->add_option("--snapshot", v_snapshot, "snapshot id (default: current)");
  validate->add_flag("--parallel", v_parallel, "scan files across threads");
  validate->add_flag("--full", v_full, "print matching entries too");
  validate->callback([&] { rc = cmd_validate(v_root, v_snapshot, v_parallel, v_full); });

  // gen table|incident
  auto* gen = app.add_subcommand("gen", "deterministic generators");
  gen->require_subcommand(1);
  auto* gtable = gen->add_subcommand("table", "seeded table");
  std::string gt_out, gt_spec;
  uint64_t gt_seed = 42;
  TableGenSpec gt_flags;
  gtable->add_option("--out", gt_out, "table directory to create")->required();
  gtable->add_option("--seed", gt_seed);
  gtable->add_option("--spec", gt_spec, "spec file ([table] section)");
  auto* f_rows = gtable->add_option("--rows", gt_flags.rows);
  auto* f_cols = gtable->add_option("--columns", gt_flags.columns);
  auto* f_files = gtable->add_option("--files", gt_flags.files);
  auto* f_parts = gtable->add_option("--partitions", gt_flags.partitions);
  auto* f_null = gtable->add_option("--null-rate", gt_flags.null_rate);
  auto* f_name = gtable->add_option("--name", gt_flags.table_name);
  gtable->callback([&] {
    std::vector<bool> set{f_rows->count() > 0,  f_cols->count() > 0, f_files->count() > 0,
                          f_parts->count() > 0, f_null->count() > 0, f_name->count() > 0};
    rc = cmd_gen_table(gt_out, gt_seed, gt_spec, gt_flags, set);
  });
  auto* gincident = gen->add_subcommand("incident", "scripted anomaly history");
  std::string gi_out, gi_name;
  gincident->add_option("--out", gi_out, "table directory to create")->required();
  gincident->add_option("--name", gi_name, "freshness_gap | null_spike")->required();
  gincident->callback([&] { rc = cmd_gen_incident(gi_out, gi_name); });

  // bench
  auto* bench = app.add_subcommand("bench", "micro benchmarks");
  bench->require_subcommand(1);
  auto* bmerge = bench->add_subcommand("sketch-merge", "serial vs parallel sketch union");
  size_t b_files = 100, b_rows = 10000, b_columns = 20;
  bmerge->add_option("--files", b_files);
  bmerge->add_option("--rows-per-file", b_rows);
  bmerge->add_option("--columns", b_columns);
  bmerge->callback([&] { rc = cmd_bench_sketch_merge(b_files, b_rows, b_columns); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConstraintViolationError& e) {
    std::cerr << "constraint violation: " << e.what() << "\n";
    return kExitConstraint;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return rc;
}
