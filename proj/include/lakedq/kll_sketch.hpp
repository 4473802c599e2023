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
#include <string>
#include <string_view>
#include <vector>

namespace lakedq {

inline constexpr uint32_t kDefaultKllK = 200;
// Normalized rank error bound for k = 200.
inline constexpr double kKllRankEps = 0.0165;

// Quantile sketch over float64 items. Buffers at level L hold items of
// weight 2^L; a level picked for compaction is sorted and every other item
// is promoted one level up. Survivor parity alternates with a compaction
// counter instead of a coin flip, so construction is fully deterministic.
// Compaction fires only when total retained items exceed the combined level
// capacity (the laziest schedule), keeping buffers near-full.
class KllSketch {
 public:
  explicit KllSketch(uint32_t k = kDefaultKllK);

  // Throws NonFiniteValueError on NaN or infinity. -0.0 is stored as +0.0.
  void update(double v);

  // Throws MixedParametersError when k differs.
  static KllSketch merge(const KllSketch& a, const KllSketch& b);

  // q in [0,1]; q=0 and q=1 answer min/max exactly. EmptySketchError on an
  // empty sketch.
  double quantile(double q) const;
  // weight(items < v) / n, clamped so rank(min)=0 and rank(max)=1 exactly.
  double rank(double v) const;

  bool empty() const { return n_ == 0; }
  uint64_t n() const { return n_; }
  uint32_t k() const { return k_; }
  double min_item() const;  // EmptySketchError when empty
  double max_item() const;
  size_t retained() const;
  size_t height() const { return levels_.size(); }

  // Payload layout: k:u32 | n:u64 | min:f64 | max:f64 | level_count:u8 |
  // per level (count:u32 | ascending items:f64[]), little-endian. Levels are
  // sorted on write, making the byte form canonical.
  std::string serialize() const;
  static KllSketch deserialize(std::string_view payload);

 private:
  uint32_t k_;
  uint64_t n_ = 0;
  double min_ = 0.0;
  double max_ = 0.0;
  std::vector<std::vector<double>> levels_;
  uint64_t compaction_count_ = 0;

  size_t level_capacity(size_t level, size_t height) const;
  size_t total_capacity() const;
  void compress();
  void compact_level(size_t level);
};

}  // namespace lakedq
