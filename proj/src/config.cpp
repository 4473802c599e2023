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

#include "lakedq/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "lakedq/errors.hpp"

namespace lakedq {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_number(const std::string& key, const std::string& raw) {
  try {
    size_t used = 0;
    double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': " + raw);
  }
}

uint64_t parse_count(const std::string& key, const std::string& raw) {
  double v = parse_number(key, raw);
  if (v < 0 || v != static_cast<uint64_t>(v))
    throw ConfigError("'" + key + "' wants a non-negative integer, got " + raw);
  return static_cast<uint64_t>(v);
}

}  // namespace

DetectorConfig parse_detector_config(const std::string& text) {
  DetectorConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section = "detector";
  std::string range_column;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("unterminated section header at line " + std::to_string(lineno));
      std::string name = trim(t.substr(1, t.size() - 2));
      if (name == "detector") {
        section = "detector";
      } else if (name.rfind("range.", 0) == 0) {
        section = "range";
        range_column = name.substr(6);
        if (range_column.empty())
          throw ConfigError("empty column in range section at line " + std::to_string(lineno));
        cfg.ranges.try_emplace(range_column);
      } else {
        throw ConfigError("unknown section '" + name + "' at line " + std::to_string(lineno));
      }
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    if (section == "range") {
      StaticRange& r = cfg.ranges[range_column];
      if (key == "min") {
        r.min = parse_number(key, value);
      } else if (key == "max") {
        r.max = parse_number(key, value);
      } else {
        throw ConfigError("unknown range key '" + key + "' at line " + std::to_string(lineno));
      }
      continue;
    }
    if (key == "window") {
      cfg.window = static_cast<size_t>(parse_count(key, value));
      if (cfg.window == 0) throw ConfigError("window must be positive");
    } else if (key == "z_threshold") {
      cfg.z_threshold = parse_number(key, value);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_number(key, value);
    } else if (key == "min_history") {
      cfg.min_history = static_cast<size_t>(parse_count(key, value));
    } else if (key == "arrival_multiplier") {
      cfg.arrival_multiplier = parse_number(key, value);
    } else if (key == "readiness_window_minutes") {
      cfg.readiness_window_micros =
          static_cast<int64_t>(parse_count(key, value)) * 60LL * 1000000;
    } else if (key == "partitions_per_day") {
      cfg.partitions_per_day = static_cast<size_t>(parse_count(key, value));
    } else if (key == "small_file_bytes") {
      cfg.small_file_bytes = parse_count(key, value);
    } else {
      throw ConfigError("unknown detector key '" + key + "' at line " + std::to_string(lineno));
    }
  }
  for (const auto& [col, r] : cfg.ranges) {
    if (r.min && r.max && *r.min > *r.max)
      throw ConfigError("range for '" + col + "' has min above max");
  }
  return cfg;
}

DetectorConfig load_detector_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) return DetectorConfig{};
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_detector_config(buf.str());
}

}  // namespace lakedq
