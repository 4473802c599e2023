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
#include <vector>

#include "lakedq/kll_sketch.hpp"
#include "lakedq/manifest.hpp"
#include "lakedq/sidecar.hpp"
#include "lakedq/table.hpp"
#include "lakedq/theta_sketch.hpp"

namespace lakedq {

// Distinct counts target ids and labels; quantiles target measures.
inline bool theta_eligible(ValueKind k) {
  return k == ValueKind::kInt64 || k == ValueKind::kString || k == ValueKind::kTimestampMicros;
}
inline bool kll_eligible(ValueKind k) { return kind_is_numeric(k); }

// Table-level sketches for the columns that carry each type.
struct MergedSketches {
  std::map<uint32_t, ThetaSketch> theta;
  std::map<uint32_t, KllSketch> kll;
};

// All live sidecars, loaded once in file order. Throws MissingSidecarError
// when a live file registered no sidecar.
std::vector<SketchSidecar> load_sidecars(const TableDir& dir,
                                         const std::vector<DataFileEntry>& files);

// Unions/merges column-by-column over preloaded sidecars. A blob must be
// present in every sidecar or in none of them; a partial column throws
// MissingSidecarError. The serial and parallel forms produce identical
// results (bit-identical serializations); the serial one is the reference
// the tests pin the parallel one against.
MergedSketches merge_sketches_serial(const std::vector<SketchSidecar>& sidecars,
                                     const std::vector<ColumnSchema>& columns);
MergedSketches merge_sketches_parallel(const std::vector<SketchSidecar>& sidecars,
                                       const std::vector<ColumnSchema>& columns);

// One column, from live files, loading only that column's blobs.
ThetaSketch merged_theta_for_column(const TableDir& dir,
                                    const std::vector<DataFileEntry>& files, uint32_t column_id);
KllSketch merged_kll_for_column(const TableDir& dir, const std::vector<DataFileEntry>& files,
                                uint32_t column_id);

}  // namespace lakedq
