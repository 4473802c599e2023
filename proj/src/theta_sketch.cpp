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

#include "lakedq/theta_sketch.hpp"

#include "lakedq/bytes.hpp"
#include "lakedq/errors.hpp"

namespace lakedq {

ThetaSketch::ThetaSketch(uint32_t nominal_k, uint64_t seed) : k_(nominal_k), seed_(seed) {
  if (nominal_k == 0) throw ConfigError("theta nominal_k must be positive");
}

void ThetaSketch::update(const Value& v, ValueKind kind) {
  std::string canonical;
  append_canonical_bytes(v, kind, canonical);
  update_hash(sketch_hash(canonical, seed_));
}

void ThetaSketch::update_hash(uint64_t h) {
  if (h >= theta_) return;
  auto [it, inserted] = entries_.insert(h);
  if (!inserted || entries_.size() <= k_) return;
  // size is k_+1: the largest entry is the (k_+1)-th smallest hash seen
  auto last = std::prev(entries_.end());
  theta_ = *last;
  entries_.erase(last);
}

double ThetaSketch::estimate() const {
  if (exact_mode()) return static_cast<double>(entries_.size());
  // |entries| / (theta / 2^64)
  return static_cast<double>(entries_.size()) * (18446744073709551616.0 / static_cast<double>(theta_));
}

std::vector<uint64_t> ThetaSketch::sorted_entries() const {
  return std::vector<uint64_t>(entries_.begin(), entries_.end());
}

std::string ThetaSketch::serialize() const {
  std::string out;
  out.reserve(16 + 8 * entries_.size());
  bytes::put_u32(out, k_);
  bytes::put_u64(out, theta_);
  bytes::put_u32(out, static_cast<uint32_t>(entries_.size()));
  for (uint64_t h : entries_) bytes::put_u64(out, h);
  return out;
}

ThetaSketch ThetaSketch::deserialize(std::string_view payload, uint64_t seed) {
  bytes::Reader r(payload, "theta payload");
  uint32_t k = r.u32();
  uint64_t theta = r.u64();
  uint32_t count = r.u32();
  ThetaSketch s(k, seed);
  s.theta_ = theta;
  uint64_t prev = 0;
  for (uint32_t i = 0; i < count; ++i) {
    uint64_t h = r.u64();
    if (i > 0 && h <= prev) throw FormatError("theta entries not strictly ascending");
    if (h >= theta) throw FormatError("theta entry above threshold");
    prev = h;
    s.entries_.insert(s.entries_.end(), h);
  }
  if (count > k) throw FormatError("theta entry count exceeds nominal_k");
  if (r.remaining() != 0) throw FormatError("trailing bytes in theta payload");
  return s;
}

ThetaSketch ThetaSketch::union_of(const std::vector<const ThetaSketch*>& inputs) {
  if (inputs.empty()) return ThetaSketch();
  const ThetaSketch& first = *inputs.front();
  ThetaSketch out(first.k_, first.seed_);
  for (const ThetaSketch* in : inputs) {
    if (in->k_ != first.k_ || in->seed_ != first.seed_) {
      throw MixedParametersError("theta union requires one nominal_k and one seed");
    }
    out.theta_ = std::min(out.theta_, in->theta_);
  }
  for (const ThetaSketch* in : inputs) {
    for (uint64_t h : in->entries_) {
      if (h < out.theta_) out.entries_.insert(h);
    }
  }
  while (out.entries_.size() > out.k_) {
    auto last = std::prev(out.entries_.end());
    out.theta_ = *last;
    out.entries_.erase(last);
  }
  return out;
}

}  // namespace lakedq
