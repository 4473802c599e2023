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
#include <string_view>

namespace lakedq {

// Seed baked into every sidecar header. Sketches built with different seeds
// must never be unioned, so the seed travels with the serialized bytes.
inline constexpr uint64_t kDefaultSketchSeed = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer, applied after FNV-1a so that low-entropy inputs
// (small integers, short strings) still spread over the full 64-bit range.
inline constexpr uint64_t avalanche64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// 64-bit FNV-1a over bytes, seed folded into the offset basis.
inline constexpr uint64_t fnv1a64(std::string_view bytes, uint64_t seed) {
  uint64_t h = 14695981039346656037ULL ^ seed;
  for (char c : bytes) {
    h ^= static_cast<uint8_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline constexpr uint64_t sketch_hash(std::string_view canonical_bytes, uint64_t seed) {
  return avalanche64(fnv1a64(canonical_bytes, seed));
}

// Non-cryptographic digest used by tests and `validate` to fingerprint
// directories and reports.
inline constexpr uint64_t digest64(std::string_view bytes, uint64_t h = 14695981039346656037ULL) {
  for (char c : bytes) {
    h ^= static_cast<uint8_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace lakedq
