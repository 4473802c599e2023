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

#include "lakedq/sketch_merge.hpp"

#include "lakedq/errors.hpp"

namespace lakedq {

std::vector<SketchSidecar> load_sidecars(const TableDir& dir,
                                         const std::vector<DataFileEntry>& files) {
  std::vector<SketchSidecar> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    if (!f.sketch_sidecar_path) throw MissingSidecarError(f.file_path);
    out.push_back(sidecar_read(dir.resolve(*f.sketch_sidecar_path)));
  }
  return out;
}

namespace {

// nullopt when no sidecar carries the blob; MissingSidecarError when only
// some do (a half-covered column cannot be merged soundly).
std::optional<ThetaSketch> union_theta_blobs(const std::vector<SketchSidecar>& sidecars,
                                             uint32_t column_id) {
  std::vector<ThetaSketch> loaded;
  size_t present = 0;
  for (const auto& sc : sidecars) {
    if (const SketchBlob* b = sc.find(kBlobTheta, column_id)) {
      ++present;
      loaded.push_back(ThetaSketch::deserialize(b->payload, sc.seed));
    }
  }
  if (present == 0) return std::nullopt;
  if (present != sidecars.size())
    throw MissingSidecarError("theta blob for column " + std::to_string(column_id) +
                              " missing from some live files");
  std::vector<const ThetaSketch*> ptrs;
  ptrs.reserve(loaded.size());
  for (const auto& s : loaded) ptrs.push_back(&s);
  return ThetaSketch::union_of(ptrs);
}

std::optional<KllSketch> merge_kll_blobs(const std::vector<SketchSidecar>& sidecars,
                                         uint32_t column_id) {
  std::optional<KllSketch> acc;
  size_t present = 0;
  for (const auto& sc : sidecars) {
    const SketchBlob* b = sc.find(kBlobKll, column_id);
    if (!b) continue;
    ++present;
    KllSketch s = KllSketch::deserialize(b->payload);
    acc = acc ? KllSketch::merge(*acc, s) : s;
  }
  if (present == 0) return std::nullopt;
  if (present != sidecars.size())
    throw MissingSidecarError("kll blob for column " + std::to_string(column_id) +
                              " missing from some live files");
  return acc;
}

}  // namespace

MergedSketches merge_sketches_serial(const std::vector<SketchSidecar>& sidecars,
                                     const std::vector<ColumnSchema>& columns) {
  MergedSketches out;
  for (const auto& col : columns) {
    if (theta_eligible(col.kind)) {
      if (auto s = union_theta_blobs(sidecars, col.column_id))
        out.theta.emplace(col.column_id, std::move(*s));
    }
    if (kll_eligible(col.kind)) {
      if (auto s = merge_kll_blobs(sidecars, col.column_id))
        out.kll.emplace(col.column_id, std::move(*s));
    }
  }
  return out;
}

MergedSketches merge_sketches_parallel(const std::vector<SketchSidecar>& sidecars,
                                       const std::vector<ColumnSchema>& columns) {
  std::vector<std::optional<ThetaSketch>> thetas(columns.size());
  std::vector<std::optional<KllSketch>> klls(columns.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < columns.size(); ++i) {
    try {
      const auto& col = columns[i];
      if (theta_eligible(col.kind)) thetas[i] = union_theta_blobs(sidecars, col.column_id);
      if (kll_eligible(col.kind)) klls[i] = merge_kll_blobs(sidecars, col.column_id);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  MergedSketches out;
  for (size_t i = 0; i < columns.size(); ++i) {
    if (thetas[i]) out.theta.emplace(columns[i].column_id, std::move(*thetas[i]));
    if (klls[i]) out.kll.emplace(columns[i].column_id, std::move(*klls[i]));
  }
  return out;
}

ThetaSketch merged_theta_for_column(const TableDir& dir,
                                    const std::vector<DataFileEntry>& files,
                                    uint32_t column_id) {
  std::vector<ThetaSketch> loaded;
  loaded.reserve(files.size());
  for (const auto& f : files) {
    if (!f.sketch_sidecar_path) throw MissingSidecarError(f.file_path);
    std::filesystem::path p = dir.resolve(*f.sketch_sidecar_path);
    auto blob = sidecar_fetch(p, kBlobTheta, column_id);
    if (!blob) throw MissingSidecarError("theta blob for column " + std::to_string(column_id) +
                                         " absent in " + f.file_path);
    loaded.push_back(ThetaSketch::deserialize(blob->payload, sidecar_seed(p)));
  }
  std::vector<const ThetaSketch*> ptrs;
  ptrs.reserve(loaded.size());
  for (const auto& s : loaded) ptrs.push_back(&s);
  return ThetaSketch::union_of(ptrs);
}

KllSketch merged_kll_for_column(const TableDir& dir, const std::vector<DataFileEntry>& files,
                                uint32_t column_id) {
  std::optional<KllSketch> acc;
  for (const auto& f : files) {
    if (!f.sketch_sidecar_path) throw MissingSidecarError(f.file_path);
    auto blob = sidecar_fetch(dir.resolve(*f.sketch_sidecar_path), kBlobKll, column_id);
    if (!blob) throw MissingSidecarError("kll blob for column " + std::to_string(column_id) +
                                         " absent in " + f.file_path);
    KllSketch s = KllSketch::deserialize(blob->payload);
    acc = acc ? KllSketch::merge(*acc, s) : s;
  }
  if (!acc) throw EmptySketchError("no live files to merge");
  return *acc;
}

}  // namespace lakedq
