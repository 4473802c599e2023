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

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "lakedq/errors.hpp"

// Little-endian scalar codec for the sidecar and sketch payloads.

namespace lakedq::bytes {

inline void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }

inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

// Bounds-checked cursor; throws TruncatedFileError on under-run.
class Reader {
 public:
  explicit Reader(std::string_view data, std::string what = "payload")
      : data_(data), what_(std::move(what)) {}

  uint8_t u8() { return static_cast<uint8_t>(take(1)[0]); }

  uint32_t u32() {
    std::string_view b = take(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(b[i]);
    return v;
  }

  uint64_t u64() {
    std::string_view b = take(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(b[i]);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string_view take(size_t n) {
    if (n > data_.size() - pos_) throw TruncatedFileError(what_);
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  void skip(size_t n) { take(n); }
  size_t remaining() const { return data_.size() - pos_; }
  size_t position() const { return pos_; }

 private:
  std::string_view data_;
  std::string what_;
  size_t pos_ = 0;
};

}  // namespace lakedq::bytes
