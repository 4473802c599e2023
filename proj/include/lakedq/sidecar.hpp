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
#include <optional>
#include <string>
#include <vector>

#include "lakedq/hash.hpp"

namespace lakedq {

inline constexpr uint8_t kBlobTheta = 1;
inline constexpr uint8_t kBlobKll = 2;

struct SketchBlob {
  uint8_t blob_type = 0;
  uint32_t column_id = 0;
  std::string payload;

  bool operator==(const SketchBlob&) const = default;
};

// .zsb container: magic "ZSB1" | version:u8=1 | seed:u64 | blob_count:u32,
// then per blob type:u8 | column_id:u32 | length:u32 | payload. Integers
// little-endian. Sidecars are metadata: reading one is not a data-file open.
struct SketchSidecar {
  uint64_t seed = kDefaultSketchSeed;
  std::vector<SketchBlob> blobs;

  const SketchBlob* find(uint8_t blob_type, uint32_t column_id) const;

  bool operator==(const SketchSidecar&) const = default;
};

// Throws DuplicateBlobError when two blobs share (type, column_id).
void sidecar_write(const std::filesystem::path& path, const SketchSidecar& sidecar);
// Throws BadMagicError / TruncatedFileError / DuplicateBlobError.
SketchSidecar sidecar_read(const std::filesystem::path& path);

// Walks blob headers, skipping payloads, and extracts only the requested
// blob. nullopt when absent.
std::optional<SketchBlob> sidecar_fetch(const std::filesystem::path& path, uint8_t blob_type,
                                        uint32_t column_id);
uint64_t sidecar_seed(const std::filesystem::path& path);

std::string sidecar_encode(const SketchSidecar& sidecar);
SketchSidecar sidecar_decode(std::string_view bytes, const std::string& what);

}  // namespace lakedq
