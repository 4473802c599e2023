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

#include "lakedq/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <random>

#include "lakedq/errors.hpp"
#include "lakedq/sketch_merge.hpp"
#include "lakedq/write_path.hpp"

namespace lakedq {

namespace {

constexpr int64_t kHourMicros = 3600LL * 1000000;
constexpr int64_t kDayMicros = 24 * kHourMicros;

// mt19937_64 raw draws only; distributions vary across library versions and
// the whole point here is byte-stable output.
class Rng {
 public:
  explicit Rng(uint64_t seed) : g_(seed) {}

  uint64_t u64() { return g_(); }
  uint64_t below(uint64_t n) { return g_() % n; }
  double unit() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 g_;
};

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

const char* kCatNames[8] = {"alpha", "bravo", "charlie", "delta",
                            "echo",  "foxtrot", "golf",  "hotel"};

std::string hex24(uint64_t a, uint64_t b) {
  static const char* digits = "0123456789abcdef";
  std::string s(24, '0');
  for (int i = 0; i < 16; ++i) s[i] = digits[(a >> (60 - 4 * i)) & 0xF];
  for (int i = 0; i < 8; ++i) s[16 + i] = digits[(b >> (28 - 4 * i)) & 0xF];
  return s;
}

struct Archetype {
  const char* base_name;
  ValueKind kind;
  bool nullable;
};

constexpr Archetype kArchetypes[10] = {
    {"id", ValueKind::kInt64, false},
    {"code", ValueKind::kString, true},
    {"event_ts", ValueKind::kTimestampMicros, false},
    {"amount", ValueKind::kFloat64, true},
    {"flag", ValueKind::kBool, true},
    {"cat", ValueKind::kString, false},
    {"qty", ValueKind::kInt64, true},
    {"score", ValueKind::kFloat64, true},
    {"token", ValueKind::kString, false},
    {"uid", ValueKind::kInt64, false},
};

Value archetype_value(size_t archetype, uint64_t seed, uint64_t global_row, double null_rate,
                      Rng& rng) {
  const Archetype& a = kArchetypes[archetype];
  if (a.nullable && rng.unit() < null_rate) return Value{};
  switch (archetype) {
    case 0:  // unique-ish key, 47 bits keeps doubles exact
      return static_cast<int64_t>(splitmix64(seed ^ global_row) & 0x7FFFFFFFFFFFULL);
    case 1: {
      uint64_t c = rng.below(16);
      return "c" + std::string(1, static_cast<char>('0' + c / 10)) +
             std::string(1, static_cast<char>('0' + c % 10));
    }
    case 2:
      return static_cast<int64_t>(kGenEpoch + static_cast<int64_t>(global_row) * 1000000 +
                                  static_cast<int64_t>(rng.below(1000)));
    case 3:
      if (rng.below(50) == 0) return 0.0;
      return rng.unit() * 10000.0;
    case 4:
      return rng.below(10) < 7;
    case 5:
      return std::string(kCatNames[rng.below(8)]);
    case 6:
      return static_cast<int64_t>(rng.below(100));
    case 7:
      if (rng.below(200) == 0) return std::numeric_limits<double>::quiet_NaN();
      return rng.unit();
    case 8:
      return hex24(rng.u64(), rng.u64());
    case 9:
      return static_cast<int64_t>(rng.below(1000000000));
  }
  return Value{};
}

class GenRowStream : public RowStream {
 public:
  GenRowStream(size_t columns, uint64_t seed, uint64_t first_row, uint64_t count,
               double null_rate)
      : columns_(columns),
        seed_(seed),
        row_(columns),
        next_row_(first_row),
        end_row_(first_row + count),
        null_rate_(null_rate),
        rng_(splitmix64(seed ^ first_row)) {}

  const Row* next() override {
    if (next_row_ >= end_row_) return nullptr;
    for (size_t c = 0; c < columns_; ++c)
      row_[c] = archetype_value(c % 10, seed_, next_row_, null_rate_, rng_);
    ++next_row_;
    ++fetched_;
    return &row_;
  }
  uint64_t fetched() const override { return fetched_; }

 private:
  size_t columns_;
  uint64_t seed_;
  Row row_;
  uint64_t next_row_;
  uint64_t end_row_;
  double null_rate_;
  Rng rng_;
  uint64_t fetched_ = 0;
};

Clock stepping_clock(std::shared_ptr<int64_t> now, int64_t step) {
  return [now, step] {
    *now += step;
    return *now;
  };
}

}  // namespace

TableSchema gen_schema(size_t columns) {
  std::vector<ColumnSchema> cols;
  cols.reserve(columns);
  for (size_t i = 0; i < columns; ++i) {
    const Archetype& a = kArchetypes[i % 10];
    std::string name = a.base_name;
    if (i >= 10) name += "_" + std::to_string(i / 10);
    cols.push_back(ColumnSchema{static_cast<uint32_t>(i + 1), name, a.kind, a.nullable});
  }
  return TableSchema(std::move(cols));
}

TableGenSpec parse_table_spec(const std::string& text) {
  TableGenSpec spec;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  bool in_table = true;
  while (std::getline(in, line)) {
    ++lineno;
    size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    auto trim = [](const std::string& s) {
      size_t b = s.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) return std::string();
      size_t e = s.find_last_not_of(" \t\r\n");
      return s.substr(b, e - b + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t != "[table]")
        throw ConfigError("unknown section '" + t + "' at line " + std::to_string(lineno));
      in_table = true;
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos || !in_table)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    auto number = [&](uint64_t lo) {
      try {
        size_t used = 0;
        unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        if (v < lo) throw std::invalid_argument(value);
        return static_cast<uint64_t>(v);
      } catch (const std::exception&) {
        throw ConfigError("bad value for '" + key + "': " + value);
      }
    };
    if (key == "name") {
      spec.table_name = value;
    } else if (key == "columns") {
      spec.columns = static_cast<size_t>(number(1));
    } else if (key == "rows") {
      spec.rows = number(0);
    } else if (key == "files") {
      spec.files = static_cast<size_t>(number(1));
    } else if (key == "partitions") {
      spec.partitions = static_cast<size_t>(number(1));
    } else if (key == "null_rate") {
      try {
        spec.null_rate = std::stod(value);
      } catch (const std::exception&) {
        throw ConfigError("bad value for 'null_rate': " + value);
      }
      if (spec.null_rate < 0.0 || spec.null_rate > 1.0)
        throw ConfigError("null_rate out of [0,1]");
    } else {
      throw ConfigError("unknown table key '" + key + "' at line " + std::to_string(lineno));
    }
  }
  return spec;
}

TableDir generate_table(const std::filesystem::path& root, uint64_t seed,
                        const TableGenSpec& spec) {
  if (spec.columns == 0 || spec.files == 0 || spec.partitions == 0)
    throw ConfigError("table spec needs at least one column, file and partition");
  TableDir dir(root);
  TableSchema schema = gen_schema(spec.columns);
  std::vector<uint32_t> priority;
  for (size_t i = 0; i < schema.size() && i < kStatsColumnCap; ++i)
    priority.push_back(schema.column_at(i).column_id);
  init_table(dir, spec.table_name, schema, priority);

  auto now = std::make_shared<int64_t>(kGenEpoch);
  TableStore store(dir, "workload-gen", stepping_clock(now, kHourMicros));

  size_t files_per_partition = std::max<size_t>(1, spec.files / spec.partitions);
  uint64_t base = spec.rows / spec.partitions;
  uint64_t extra = spec.rows % spec.partitions;
  uint64_t first_row = 0;
  for (size_t p = 0; p < spec.partitions; ++p) {
    uint64_t rows_p = base + (p < extra ? 1 : 0);
    if (rows_p == 0) continue;
    size_t chunk = static_cast<size_t>((rows_p + files_per_partition - 1) / files_per_partition);
    GenRowStream rows(spec.columns, seed, first_row, rows_p, spec.null_rate);
    store.append("p" + std::to_string(p), rows, chunk);
    first_row += rows_p;
  }
  return dir;
}

uint64_t directory_hash(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& ent : std::filesystem::recursive_directory_iterator(root)) {
    if (ent.is_regular_file()) files.push_back(ent.path());
  }
  std::vector<std::string> rel;
  rel.reserve(files.size());
  for (const auto& f : files) rel.push_back(f.lexically_relative(root).generic_string());
  std::sort(rel.begin(), rel.end());

  uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&h](const char* data, size_t n) {
    for (size_t i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(data[i]);
      h *= 0x100000001B3ULL;
    }
  };
  for (const auto& r : rel) {
    feed(r.data(), r.size());
    feed("\0", 1);
    std::ifstream in(root / r, std::ios::binary);
    char buf[8192];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
      feed(buf, static_cast<size_t>(in.gcount()));
      if (!in) break;
    }
    feed("\x01", 1);
  }
  return h;
}

std::vector<std::string> generate_rule_corpus(uint64_t seed, size_t count,
                                              const TableSchema& schema) {
  std::vector<std::string> numeric, booleans, thetas;
  for (size_t i = 0; i < schema.size(); ++i) {
    const ColumnSchema& c = schema.column_at(i);
    if (kind_is_numeric(c.kind)) numeric.push_back(c.name);
    if (c.kind == ValueKind::kBool) booleans.push_back(c.name);
    if (theta_eligible(c.kind)) thetas.push_back(c.name);
  }
  if (numeric.empty()) throw ConfigError("rule corpus needs a numeric column");
  if (thetas.empty()) throw ConfigError("rule corpus needs an id-like column");

  Rng rng(seed);
  auto num = [&] { return numeric[rng.below(numeric.size())]; };
  auto theta_col = [&] { return thetas[rng.below(thetas.size())]; };
  auto any_col = [&] { return schema.column_at(rng.below(schema.size())).name; };

  std::vector<std::string> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    uint64_t r = rng.below(100);
    std::string text;
    if (r < 15) {
      text = "count > " + std::to_string(100 + rng.below(9900));
    } else if (r < 43) {
      text = "notNull(" + any_col() + ", < " + std::to_string(1 + rng.below(20)) + "%)";
    } else if (r < 51) {
      text = rng.below(2) == 0 ? "min(" + num() + ") >= 0"
                               : "max(" + num() + ") <= " + std::to_string(1000 + rng.below(9000));
    } else if (r < 62) {
      uint64_t tol = 5 + rng.below(21);
      std::string frac = std::string(tol < 10 ? "0" : "") + std::to_string(tol);
      text = rng.below(2) == 0
                 ? "compare(count, prev_snapshot, 0." + frac + ")"
                 : "compare(sum(" + num() + "), prev_snapshot, 0." + frac + ")";
    } else if (r < 79) {
      switch (booleans.empty() ? rng.below(3) : rng.below(4)) {
        case 0: text = "sum(" + num() + ") > 0"; break;
        case 1: text = "mean(" + num() + ") < " + std::to_string(100 + rng.below(900)); break;
        case 2: text = "zeroCount(" + num() + ") <= " + std::to_string(rng.below(1000)); break;
        default:
          text = "trueCount(" + booleans[rng.below(booleans.size())] + ") >= 0";
          break;
      }
    } else if (r < 87) {
      text = "distinct(" + theta_col() + ") > " + std::to_string(1 + rng.below(100));
    } else if (r < 88) {
      switch (rng.below(3)) {
        case 0: text = "median(" + num() + ") < " + std::to_string(100 + rng.below(900)); break;
        case 1:
          text = "percentile(" + num() + ", 0.95) < " + std::to_string(1000 + rng.below(9000));
          break;
        default: text = "iqr(" + num() + ") < " + std::to_string(100 + rng.below(900)); break;
      }
    } else {
      std::string a = num();
      std::string b = num();
      text = "expr(" + a + " <= " + b + " * 1.15 + " + std::to_string(1 + rng.below(1000)) + ")";
    }
    out.push_back(std::move(text));
  }
  return out;
}

DetectorConfig disabled_detectors() {
  DetectorConfig cfg;
  cfg.min_history = std::numeric_limits<size_t>::max();
  cfg.partitions_per_day = 0;
  cfg.ranges.clear();
  return cfg;
}

namespace {

// Rows for the scripted incidents. Nulls land on the first null_count rows;
// detectors see fractions, not positions.
std::vector<Row> incident_rows(uint64_t rows, uint64_t null_count, bool flag_value,
                               bool flags_mixed, int64_t day_ts, uint64_t seed) {
  std::vector<Row> out;
  out.reserve(rows);
  Rng rng(splitmix64(seed));
  for (uint64_t i = 0; i < rows; ++i) {
    Row r;
    r.push_back(static_cast<int64_t>(splitmix64(seed ^ i) & 0x7FFFFFFFFFFFULL));
    if (i < null_count) {
      r.push_back(Value{});
    } else {
      r.push_back(rng.unit() * 100.0);
    }
    bool f = flags_mixed ? rng.below(10) < 7 : flag_value;
    r.push_back(f);
    r.push_back(static_cast<int64_t>(day_ts + static_cast<int64_t>(i)));
    out.push_back(std::move(r));
  }
  return out;
}

TableSchema incident_schema() {
  return TableSchema({
      ColumnSchema{1, "id", ValueKind::kInt64, false},
      ColumnSchema{2, "val", ValueKind::kFloat64, true},
      ColumnSchema{3, "active", ValueKind::kBool, false},
      ColumnSchema{4, "event_ts", ValueKind::kTimestampMicros, false},
  });
}

}  // namespace

IncidentFixture replay_incident(const std::filesystem::path& root, const std::string& name) {
  IncidentFixture fx;
  fx.name = name;
  fx.table_root = root;
  fx.config = DetectorConfig{};

  TableDir dir(root);
  auto now = std::make_shared<int64_t>(0);
  Clock clk = [now] { return *now; };

  if (name == "freshness_gap") {
    // Fourteen steady daily loads, then a day that silently drops 3% of its
    // rows and zeroes the flag column, then nothing at all.
    init_table(dir, "ingest_feed", incident_schema(), {1, 2, 3, 4});
    TableStore store(dir, "ingest-job", clk);
    const uint64_t daily = 10000;
    for (int day = 1; day <= 15; ++day) {
      *now = kGenEpoch + day * kDayMicros;
      bool corrupted = day == 15;
      uint64_t rows = corrupted ? daily - daily * 3 / 100 : daily;
      std::string key = "d" + std::string(day < 10 ? "0" : "") + std::to_string(day);
      WriteBatch batch{key, incident_rows(rows, rows / 100, false, !corrupted,
                                          kGenEpoch + day * kDayMicros,
                                          0xFEED + static_cast<uint64_t>(day))};
      store.append(batch);
    }
    fx.sweep_now = kGenEpoch + 19 * kDayMicros;
    fx.expected = {
        {AlertKind::kRowCountAnomaly, 15},
        {AlertKind::kFreshnessGap, 0},
    };
    return fx;
  }

  if (name == "null_spike") {
    // Ten commits holding 1% nulls, then 8%, 15%, 25%. The first elevated
    // commit is the thirteenth snapshot minus two: id 11.
    init_table(dir, "feature_feed", incident_schema(), {1, 2, 3, 4});
    TableStore store(dir, "feature-job", clk);
    const uint64_t rows = 1000;
    const uint64_t nulls[13] = {10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 80, 150, 250};
    for (int i = 0; i < 13; ++i) {
      *now = kGenEpoch + (i + 1) * kHourMicros;
      WriteBatch batch{"p0", incident_rows(rows, nulls[i], false, true,
                                           kGenEpoch + (i + 1) * kHourMicros,
                                           0xBEEF + static_cast<uint64_t>(i))};
      store.append(batch);
    }
    fx.sweep_now = 0;
    fx.expected = {{AlertKind::kNullDrift, 11}};
    return fx;
  }

  throw UnknownScenarioError("no scripted incident named '" + name + "'");
}

}  // namespace lakedq
