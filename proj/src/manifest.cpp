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

#include "lakedq/manifest.hpp"

#include <fstream>
#include <sstream>

#include "lakedq/errors.hpp"

namespace lakedq {

namespace {

std::string to_hex(const std::string& s) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(s.size() * 2);
  for (unsigned char c : s) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xF]);
  }
  return out;
}

std::string from_hex(const std::string& s) {
  if (s.size() % 2) throw FormatError("odd hex length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw FormatError("bad hex digit");
  };
  std::string out;
  out.reserve(s.size() / 2);
  for (size_t i = 0; i < s.size(); i += 2) {
    out.push_back(static_cast<char>((nibble(s[i]) << 4) | nibble(s[i + 1])));
  }
  return out;
}

}  // namespace

nlohmann::json value_to_json(const Value& v) {
  if (is_null(v)) return nullptr;
  if (const auto* i = std::get_if<int64_t>(&v)) return {{"t", "i"}, {"v", *i}};
  if (const auto* d = std::get_if<double>(&v)) return {{"t", "f"}, {"v", *d}};
  if (const auto* b = std::get_if<bool>(&v)) return {{"t", "b"}, {"v", *b}};
  const std::string& s = std::get<std::string>(v);
  if (is_valid_utf8(s)) return {{"t", "s"}, {"v", s}};
  return {{"t", "sx"}, {"v", to_hex(s)}};
}

Value value_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::monostate{};
  const std::string t = j.at("t").get<std::string>();
  if (t == "i") return j.at("v").get<int64_t>();
  if (t == "f") return j.at("v").get<double>();
  if (t == "b") return j.at("v").get<bool>();
  if (t == "s") return j.at("v").get<std::string>();
  if (t == "sx") return from_hex(j.at("v").get<std::string>());
  throw FormatError("unknown value tag: " + t);
}

nlohmann::json column_stats_to_json(const ColumnStats& s) {
  nlohmann::json j{{"id", s.column_id},
                   {"values", s.value_count},
                   {"nulls", s.null_count},
                   {"nans", s.nan_count},
                   {"bytes", s.column_size_bytes}};
  if (s.lower_bound) j["lower"] = value_to_json(*s.lower_bound);
  if (s.upper_bound) j["upper"] = value_to_json(*s.upper_bound);
  if (s.sum) j["sum"] = *s.sum;
  if (s.zero_count) j["zeros"] = *s.zero_count;
  if (s.true_count) j["trues"] = *s.true_count;
  return j;
}

ColumnStats column_stats_from_json(const nlohmann::json& j) {
  ColumnStats s;
  s.column_id = j.at("id").get<uint32_t>();
  s.value_count = j.at("values").get<uint64_t>();
  s.null_count = j.at("nulls").get<uint64_t>();
  s.nan_count = j.at("nans").get<uint64_t>();
  s.column_size_bytes = j.at("bytes").get<uint64_t>();
  if (j.contains("lower")) s.lower_bound = value_from_json(j.at("lower"));
  if (j.contains("upper")) s.upper_bound = value_from_json(j.at("upper"));
  if (j.contains("sum")) s.sum = j.at("sum").get<double>();
  if (j.contains("zeros")) s.zero_count = j.at("zeros").get<uint64_t>();
  if (j.contains("trues")) s.true_count = j.at("trues").get<uint64_t>();
  return s;
}

const ColumnStats* DataFileEntry::find_stats(uint32_t column_id) const {
  for (const auto& s : column_stats)
    if (s.column_id == column_id) return &s;
  return nullptr;
}

namespace {

nlohmann::json data_entry_to_json(const DataFileEntry& e) {
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& s : e.column_stats) stats.push_back(column_stats_to_json(s));
  nlohmann::json j{{"kind", "data"},
                   {"path", e.file_path},
                   {"partition", e.partition_key},
                   {"records", e.record_count},
                   {"size", e.file_size_bytes},
                   {"stats", std::move(stats)}};
  if (e.sketch_sidecar_path) j["sidecar"] = *e.sketch_sidecar_path;
  return j;
}

DataFileEntry data_entry_from_json(const nlohmann::json& j) {
  DataFileEntry e;
  e.file_path = j.at("path").get<std::string>();
  e.partition_key = j.at("partition").get<std::string>();
  e.record_count = j.at("records").get<uint64_t>();
  e.file_size_bytes = j.at("size").get<uint64_t>();
  for (const auto& js : j.at("stats")) e.column_stats.push_back(column_stats_from_json(js));
  if (j.contains("sidecar")) e.sketch_sidecar_path = j.at("sidecar").get<std::string>();
  return e;
}

nlohmann::json delete_entry_to_json(const DeleteFileEntry& e) {
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : e.targets) {
    targets.push_back({{"file", t.data_file_path}, {"positions", t.positions}});
  }
  return {{"kind", "delete"},
          {"path", e.file_path},
          {"partition", e.partition_key},
          {"count", e.delete_count},
          {"targets", std::move(targets)}};
}

DeleteFileEntry delete_entry_from_json(const nlohmann::json& j) {
  DeleteFileEntry e;
  e.file_path = j.at("path").get<std::string>();
  e.partition_key = j.at("partition").get<std::string>();
  e.delete_count = j.at("count").get<uint64_t>();
  for (const auto& jt : j.at("targets")) {
    DeleteTarget t;
    t.data_file_path = jt.at("file").get<std::string>();
    t.positions = jt.at("positions").get<std::vector<uint64_t>>();
    e.targets.push_back(std::move(t));
  }
  return e;
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  std::ostringstream out;
  for (const auto& e : m.data_files) out << data_entry_to_json(e).dump() << '\n';
  for (const auto& e : m.delete_files) out << delete_entry_to_json(e).dump() << '\n';
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FileIoError("cannot write manifest: " + path.string());
  f << out.str();
  f.flush();
  if (!f) throw FileIoError("manifest write failed: " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FileIoError("cannot read manifest: " + path.string());
  Manifest m;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "data") {
      m.data_files.push_back(data_entry_from_json(j));
    } else if (kind == "delete") {
      m.delete_files.push_back(delete_entry_from_json(j));
    } else {
      throw FormatError("unknown manifest entry kind: " + kind);
    }
  }
  return m;
}

AggregatedColumnStats aggregate_stats(const std::vector<DataFileEntry>& entries,
                                      uint32_t column_id) {
  AggregatedColumnStats agg;
  agg.column_id = column_id;
  for (const auto& e : entries) {
    const ColumnStats* s = e.find_stats(column_id);
    if (!s) throw MissingStatsError(column_id, e.file_path);
    aggregate_add(agg, e.file_path, e.record_count, *s);
  }
  return agg;
}

uint64_t total_record_count(const std::vector<DataFileEntry>& entries) {
  uint64_t n = 0;
  for (const auto& e : entries) n += e.record_count;
  return n;
}

uint64_t corrected_record_count(const Manifest& m) {
  uint64_t n = total_record_count(m.data_files);
  for (const auto& d : m.delete_files) n -= d.delete_count;
  return n;
}

std::map<std::string, int64_t> per_partition_corrected(const Manifest& m) {
  std::map<std::string, int64_t> by_part;
  for (const auto& e : m.data_files)
    by_part[e.partition_key] += static_cast<int64_t>(e.record_count);
  for (const auto& d : m.delete_files)
    by_part[d.partition_key] -= static_cast<int64_t>(d.delete_count);
  return by_part;
}

std::map<std::string, std::set<uint64_t>> deleted_positions(const Manifest& m) {
  std::map<std::string, std::set<uint64_t>> by_file;
  for (const auto& d : m.delete_files)
    for (const auto& t : d.targets)
      by_file[t.data_file_path].insert(t.positions.begin(), t.positions.end());
  return by_file;
}

}  // namespace lakedq
