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
#include <string>
#include <vector>

#include "lakedq/config.hpp"
#include "lakedq/observe.hpp"
#include "lakedq/table.hpp"

namespace lakedq {

// Seeded generators for tables, commit histories and rule corpora. Same
// seed, same bytes on disk; everything else in the test suite leans on that.

inline constexpr int64_t kGenEpoch = 1767225600000000;  // 2026-01-01T00:00:00Z

struct TableGenSpec {
  std::string table_name = "gen";
  size_t columns = 20;
  uint64_t rows = 100000;
  size_t files = 10;       // per table; exact when rows split evenly
  size_t partitions = 1;   // keys p0..p{n-1}, rows split round-robin
  double null_rate = 0.01; // nullable archetypes only

  bool operator==(const TableGenSpec&) const = default;
};

// Same INI dialect as the detector config:
//   [table]
//   columns = 20
//   rows = 1000000
TableGenSpec parse_table_spec(const std::string& text);

// Builds schema (ten column archetypes, cycled), writes one append commit
// per non-empty partition, finishes with table metadata on disk. Archetypes
// cover high-NDV ids, low-cardinality labels, timestamps, measures with
// nulls and NaN, booleans and strings longer than the bound prefix.
TableDir generate_table(const std::filesystem::path& root, uint64_t seed,
                        const TableGenSpec& spec);

// The archetype schema alone, for building rule corpora without a table.
TableSchema gen_schema(size_t columns);

// Order-independent content hash over every regular file under root.
uint64_t directory_hash(const std::filesystem::path& root);

// Weighted mix across rule families; weights sum to 100 and skew toward the
// cheap families the way fleets of production checks do. Each text parses
// against the given schema.
std::vector<std::string> generate_rule_corpus(uint64_t seed, size_t count,
                                              const TableSchema& schema);

struct ExpectedAlert {
  AlertKind kind = AlertKind::kRowCountAnomaly;
  // Snapshot carrying the FIRST alert of this kind; 0 means it comes from
  // the clock sweep, not from any commit.
  uint64_t snapshot_id = 0;

  bool operator==(const ExpectedAlert&) const = default;
};

struct IncidentFixture {
  std::string name;
  std::filesystem::path table_root;
  int64_t sweep_now = 0;  // 0: scenario needs no clock sweep
  DetectorConfig config;  // detectors the expectations assume
  std::vector<ExpectedAlert> expected;
};

// Scripted histories:
//   freshness_gap: daily loads, one short+corrupted day, then silence.
//   null_spike: steady nulls, then a three-commit ramp.
// Magnitudes are fixture constants, chosen to trip the default detectors,
// not to model any particular production feed.
IncidentFixture replay_incident(const std::filesystem::path& root, const std::string& name);

// Everything off: statistical checks starved of history, structural checks
// zeroed. Replaying any scenario under this yields no alerts.
DetectorConfig disabled_detectors();

}  // namespace lakedq
