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

#include "lakedq/kll_sketch.hpp"

#include <algorithm>
#include <cmath>

#include "lakedq/bytes.hpp"
#include "lakedq/errors.hpp"

namespace lakedq {

namespace {
constexpr size_t kMinLevelWidth = 8;
constexpr double kLevelShrink = 2.0 / 3.0;
}  // namespace

KllSketch::KllSketch(uint32_t k) : k_(k) {
  if (k < kMinLevelWidth) throw ConfigError("kll k below the minimum level width");
}

size_t KllSketch::level_capacity(size_t level, size_t height) const {
  // top level holds k items; each level below shrinks by 2/3, floored
  size_t depth = height - 1 - level;
  double cap = static_cast<double>(k_);
  for (size_t i = 0; i < depth; ++i) cap *= kLevelShrink;
  size_t rounded = static_cast<size_t>(std::ceil(cap));
  return std::max(rounded, kMinLevelWidth);
}

size_t KllSketch::total_capacity() const {
  size_t total = 0;
  for (size_t l = 0; l < levels_.size(); ++l) total += level_capacity(l, levels_.size());
  return total;
}

size_t KllSketch::retained() const {
  size_t total = 0;
  for (const auto& buf : levels_) total += buf.size();
  return total;
}

void KllSketch::update(double v) {
  if (!std::isfinite(v)) throw NonFiniteValueError("kll item must be finite");
  if (v == 0.0) v = 0.0;  // -0.0 folds onto +0.0 for canonical bytes
  if (n_ == 0) {
    min_ = max_ = v;
  } else {
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
  if (levels_.empty()) levels_.emplace_back();
  levels_[0].push_back(v);
  ++n_;
  compress();
}

void KllSketch::compress() {
  while (retained() > total_capacity()) {
    size_t height = levels_.size();
    size_t pick = height;  // lowest level at or over its capacity
    for (size_t l = 0; l < height; ++l) {
      if (levels_[l].size() >= level_capacity(l, height)) {
        pick = l;
        break;
      }
    }
    if (pick == height) break;  // every level under capacity; nothing to do
    compact_level(pick);
  }
}

void KllSketch::compact_level(size_t level) {
  if (level + 1 == levels_.size()) levels_.emplace_back();
  std::vector<double>& buf = levels_[level];
  std::sort(buf.begin(), buf.end());
  // odd size: the smallest stays behind at its own weight, so total weight
  // is conserved exactly
  size_t keep = buf.size() % 2;
  size_t offset = compaction_count_ % 2;
  ++compaction_count_;
  std::vector<double>& up = levels_[level + 1];
  for (size_t r = offset; keep + r < buf.size(); r += 2) {
    up.push_back(buf[keep + r]);
  }
  buf.resize(keep);
}

KllSketch KllSketch::merge(const KllSketch& a, const KllSketch& b) {
  if (a.k_ != b.k_) throw MixedParametersError("kll merge requires one k");
  if (a.empty()) return b;
  if (b.empty()) return a;
  KllSketch out(a.k_);
  out.n_ = a.n_ + b.n_;
  out.min_ = std::min(a.min_, b.min_);
  out.max_ = std::max(a.max_, b.max_);
  out.compaction_count_ = a.compaction_count_ + b.compaction_count_;
  out.levels_.resize(std::max(a.levels_.size(), b.levels_.size()));
  for (size_t l = 0; l < out.levels_.size(); ++l) {
    if (l < a.levels_.size()) {
      out.levels_[l].insert(out.levels_[l].end(), a.levels_[l].begin(), a.levels_[l].end());
    }
    if (l < b.levels_.size()) {
      out.levels_[l].insert(out.levels_[l].end(), b.levels_[l].begin(), b.levels_[l].end());
    }
  }
  out.compress();
  return out;
}

double KllSketch::min_item() const {
  if (empty()) throw EmptySketchError("min of empty sketch");
  return min_;
}

double KllSketch::max_item() const {
  if (empty()) throw EmptySketchError("max of empty sketch");
  return max_;
}

double KllSketch::quantile(double q) const {
  if (empty()) throw EmptySketchError("quantile of empty sketch");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile fraction outside [0,1]");
  if (q == 0.0) return min_;
  if (q == 1.0) return max_;
  std::vector<std::pair<double, uint64_t>> weighted;
  weighted.reserve(retained());
  for (size_t l = 0; l < levels_.size(); ++l) {
    uint64_t w = uint64_t{1} << l;
    for (double v : levels_[l]) weighted.emplace_back(v, w);
  }
  std::sort(weighted.begin(), weighted.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  double target = q * static_cast<double>(n_);
  double cum = 0.0;
  for (const auto& [v, w] : weighted) {
    cum += static_cast<double>(w);
    if (cum >= target) return v;
  }
  return max_;
}

double KllSketch::rank(double v) const {
  if (empty()) throw EmptySketchError("rank of empty sketch");
  if (v <= min_) return 0.0;
  if (v >= max_) return 1.0;
  uint64_t below = 0;
  for (size_t l = 0; l < levels_.size(); ++l) {
    uint64_t w = uint64_t{1} << l;
    for (double x : levels_[l]) {
      if (x < v) below += w;
    }
  }
  double r = static_cast<double>(below) / static_cast<double>(n_);
  return std::min(r, 1.0);
}

std::string KllSketch::serialize() const {
  std::string out;
  bytes::put_u32(out, k_);
  bytes::put_u64(out, n_);
  bytes::put_f64(out, empty() ? 0.0 : min_);
  bytes::put_f64(out, empty() ? 0.0 : max_);
  bytes::put_u8(out, static_cast<uint8_t>(levels_.size()));
  for (const auto& buf : levels_) {
    std::vector<double> sorted = buf;
    std::sort(sorted.begin(), sorted.end());
    bytes::put_u32(out, static_cast<uint32_t>(sorted.size()));
    for (double v : sorted) bytes::put_f64(out, v);
  }
  return out;
}

KllSketch KllSketch::deserialize(std::string_view payload) {
  bytes::Reader r(payload, "kll payload");
  uint32_t k = r.u32();
  KllSketch s(k);
  s.n_ = r.u64();
  s.min_ = r.f64();
  s.max_ = r.f64();
  uint8_t level_count = r.u8();
  uint64_t weight = 0;
  for (uint8_t l = 0; l < level_count; ++l) {
    uint32_t count = r.u32();
    std::vector<double> buf;
    buf.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
      double v = r.f64();
      if (!std::isfinite(v)) throw FormatError("non-finite kll item");
      buf.push_back(v);
    }
    weight += static_cast<uint64_t>(count) << l;
    s.levels_.push_back(std::move(buf));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in kll payload");
  if (weight != s.n_) throw FormatError("kll level weights do not sum to n");
  return s;
}

}  // namespace lakedq
