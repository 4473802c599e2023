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
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace lakedq {

struct StaticRange {
  std::optional<double> min;
  std::optional<double> max;
};

// Detection knobs. Every default is declared here, not inferred from data.
struct DetectorConfig {
  size_t window = 28;              // trailing points per statistical window
  double z_threshold = 3.0;        // |robust z| above this alerts
  double epsilon = 1e-9;           // keeps the z denominator off zero
  size_t min_history = 8;          // points required before z fires
  double arrival_multiplier = 2.0; // gap > multiplier * median gap alerts
  int64_t readiness_window_micros = 3600LL * 1000000;  // lookback-write flag
  size_t partitions_per_day = 1000;
  uint64_t small_file_bytes = 1 << 20;  // median under this marks over-partitioning

  // column name -> static allowed range
  std::map<std::string, StaticRange> ranges;
};

// INI-style:
//   [detector]
//   window = 28
//   [range.score]
//   min = 0
//   max = 1
// '#' and ';' start comments. Unknown keys throw ConfigError.
DetectorConfig parse_detector_config(const std::string& text);
DetectorConfig load_detector_config(const std::filesystem::path& path);  // missing file: defaults

}  // namespace lakedq
