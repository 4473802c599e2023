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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lakedq/hash.hpp"
#include "lakedq/value.hpp"

namespace lakedq {

inline constexpr uint32_t kDefaultThetaK = 4096;
inline constexpr uint64_t kThetaMax = UINT64_MAX;

// Distinct-count sketch: keeps the nominal_k smallest distinct hashes, with
// theta the (nominal_k+1)-th smallest once the budget is exceeded. No
// probabilistic downsampling, so a union over any partition of a stream is
// identical (entry set, theta, and bytes) to the single-pass sketch.
class ThetaSketch {
 public:
  explicit ThetaSketch(uint32_t nominal_k = kDefaultThetaK, uint64_t seed = kDefaultSketchSeed);

  void update(const Value& v, ValueKind kind);  // null must be filtered by caller
  void update_hash(uint64_t h);

  // theta == MAX means every distinct value seen is retained: the estimate
  // |entries| is exact.
  bool exact_mode() const { return theta_ == kThetaMax; }
  double estimate() const;

  uint32_t nominal_k() const { return k_; }
  uint64_t seed() const { return seed_; }
  uint64_t theta() const { return theta_; }
  size_t entry_count() const { return entries_.size(); }
  std::vector<uint64_t> sorted_entries() const;

  // Payload layout: k:u32 | theta:u64 | count:u32 | count ascending u64
  // hashes, little-endian. The seed travels in the sidecar header.
  std::string serialize() const;
  static ThetaSketch deserialize(std::string_view payload, uint64_t seed);

  // Throws MixedParametersError when nominal_k or seed differ. An empty
  // input list yields an empty sketch with the defaults.
  static ThetaSketch union_of(const std::vector<const ThetaSketch*>& inputs);

  bool operator==(const ThetaSketch&) const = default;

 private:
  uint32_t k_;
  uint64_t seed_;
  uint64_t theta_ = kThetaMax;
  std::set<uint64_t> entries_;  // each < theta_, size <= k_
};

}  // namespace lakedq
