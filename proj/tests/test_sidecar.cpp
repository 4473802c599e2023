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

#include <fstream>
#include <random>

#include <doctest.h>

#include "lakedq/errors.hpp"
#include "lakedq/sidecar.hpp"
#include "lakedq/sketch_merge.hpp"
#include "test_util.hpp"

using namespace lakedq;

namespace {

SketchSidecar make_sidecar(uint64_t seed_data, uint32_t columns) {
  SketchSidecar sc;
  std::mt19937_64 rng(seed_data);
  for (uint32_t id = 1; id <= columns; ++id) {
    ThetaSketch t;
    KllSketch k;
    size_t n = 100 + rng() % 2000;
    for (size_t i = 0; i < n; ++i) {
      uint64_t raw = rng();
      t.update(Value{static_cast<int64_t>(raw % 5000)}, ValueKind::kInt64);
      k.update(static_cast<double>(raw >> 40));
    }
    sc.blobs.push_back(SketchBlob{kBlobTheta, id, t.serialize()});
    sc.blobs.push_back(SketchBlob{kBlobKll, id, k.serialize()});
  }
  return sc;
}

}  // namespace

TEST_CASE("sidecar file round trips") {
  testutil::TempDir tmp;
  SketchSidecar sc = make_sidecar(11, 3);
  auto path = tmp / "f0.sketch";
  sidecar_write(path, sc);
  CHECK(sidecar_read(path) == sc);
  CHECK(sidecar_seed(path) == sc.seed);

  auto blob = sidecar_fetch(path, kBlobTheta, 2);
  REQUIRE(blob.has_value());
  CHECK(*blob == sc.blobs[2]);
  CHECK(!sidecar_fetch(path, kBlobTheta, 99).has_value());
  CHECK(!sidecar_fetch(path, 7, 1).has_value());
}

TEST_CASE("sidecar encoding is deterministic") {
  SketchSidecar sc = make_sidecar(5, 2);
  CHECK(sidecar_encode(sc) == sidecar_encode(sc));
  SketchSidecar back = sidecar_decode(sidecar_encode(sc), "test");
  CHECK(back == sc);
}

TEST_CASE("sidecar decode rejects bad magic, truncation and duplicate blobs") {
  SketchSidecar sc = make_sidecar(7, 1);
  std::string bytes = sidecar_encode(sc);

  std::string bad = bytes;
  bad[0] ^= 0x5A;
  CHECK_THROWS_AS(sidecar_decode(bad, "test"), BadMagicError);

  CHECK_THROWS_AS(sidecar_decode(std::string_view(bytes).substr(0, bytes.size() / 2), "test"),
                  TruncatedFileError);

  SketchSidecar dup = sc;
  dup.blobs.push_back(dup.blobs[0]);
  CHECK_THROWS_AS(sidecar_decode(sidecar_encode(dup), "test"), DuplicateBlobError);
}

TEST_CASE("load_sidecars keeps file order and flags gaps") {
  testutil::TempDir tmp;
  TableDir dir(tmp / "t");
  std::filesystem::create_directories(dir.sketches_dir());
  std::vector<DataFileEntry> files;
  std::vector<SketchSidecar> expect;
  for (int i = 0; i < 4; ++i) {
    SketchSidecar sc = make_sidecar(100 + i, 2);
    std::string rel = "sketches/f" + std::to_string(i) + ".sketch";
    sidecar_write(dir.resolve(rel), sc);
    DataFileEntry e;
    e.file_path = "data/f" + std::to_string(i) + ".csv";
    e.sketch_sidecar_path = rel;
    files.push_back(e);
    expect.push_back(sc);
  }
  CHECK(load_sidecars(dir, files) == expect);

  files[2].sketch_sidecar_path.reset();
  CHECK_THROWS_AS(load_sidecars(dir, files), MissingSidecarError);
}

TEST_CASE("serial and parallel merges serialize identically") {
  std::vector<SketchSidecar> sidecars;
  for (int i = 0; i < 24; ++i) sidecars.push_back(make_sidecar(500 + i, 6));
  std::vector<ColumnSchema> cols;
  for (uint32_t id = 1; id <= 6; ++id)
    cols.push_back(ColumnSchema{id, "c" + std::to_string(id),
                                id % 2 ? ValueKind::kInt64 : ValueKind::kFloat64, true});

  MergedSketches serial = merge_sketches_serial(sidecars, cols);
  MergedSketches parallel = merge_sketches_parallel(sidecars, cols);

  // thetas only for int64 columns, klls for all numerics
  CHECK(serial.theta.size() == 3);
  CHECK(serial.kll.size() == 6);
  REQUIRE(parallel.theta.size() == serial.theta.size());
  REQUIRE(parallel.kll.size() == serial.kll.size());
  for (const auto& [id, t] : serial.theta) CHECK(parallel.theta.at(id).serialize() == t.serialize());
  for (const auto& [id, k] : serial.kll) CHECK(parallel.kll.at(id).serialize() == k.serialize());
}

TEST_CASE("merge refuses a column present in only some sidecars") {
  std::vector<SketchSidecar> sidecars = {make_sidecar(1, 3), make_sidecar(2, 2)};
  std::vector<ColumnSchema> cols = {ColumnSchema{3, "c3", ValueKind::kInt64, true}};
  CHECK_THROWS_AS(merge_sketches_serial(sidecars, cols), MissingSidecarError);
}

TEST_CASE("single-column merge equals the manual union over live files") {
  testutil::TempDir tmp;
  TableDir dir(tmp / "t");
  std::filesystem::create_directories(dir.sketches_dir());
  std::vector<DataFileEntry> files;
  std::vector<ThetaSketch> thetas;
  std::vector<KllSketch> klls;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5; ++i) {
    ThetaSketch t;
    KllSketch k;
    for (int j = 0; j < 3000; ++j) {
      int64_t v = static_cast<int64_t>(rng() % 20000);
      t.update(Value{v}, ValueKind::kInt64);
      k.update(static_cast<double>(v));
    }
    SketchSidecar sc;
    sc.blobs.push_back(SketchBlob{kBlobTheta, 1, t.serialize()});
    sc.blobs.push_back(SketchBlob{kBlobKll, 1, k.serialize()});
    std::string rel = "sketches/g" + std::to_string(i) + ".sketch";
    sidecar_write(dir.resolve(rel), sc);
    DataFileEntry e;
    e.file_path = "data/g" + std::to_string(i) + ".csv";
    e.sketch_sidecar_path = rel;
    files.push_back(e);
    thetas.push_back(t);
    klls.push_back(k);
  }

  std::vector<const ThetaSketch*> ptrs;
  for (const auto& t : thetas) ptrs.push_back(&t);
  CHECK(merged_theta_for_column(dir, files, 1).serialize() ==
        ThetaSketch::union_of(ptrs).serialize());

  KllSketch manual = klls[0];
  for (size_t i = 1; i < klls.size(); ++i) manual = KllSketch::merge(manual, klls[i]);
  CHECK(merged_kll_for_column(dir, files, 1).serialize() == manual.serialize());

  CHECK_THROWS_AS(merged_theta_for_column(dir, files, 9), MissingSidecarError);
}
