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

#include "lakedq/value.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>

namespace lakedq {

const char* kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::kInt64:
      return "int64";
    case ValueKind::kFloat64:
      return "float64";
    case ValueKind::kString:
      return "string";
    case ValueKind::kBool:
      return "bool";
    case ValueKind::kTimestampMicros:
      return "timestamp-micros";
  }
  return "?";
}

std::optional<ValueKind> kind_from_name(std::string_view name) {
  if (name == "int64") return ValueKind::kInt64;
  if (name == "float64") return ValueKind::kFloat64;
  if (name == "string") return ValueKind::kString;
  if (name == "bool") return ValueKind::kBool;
  if (name == "timestamp-micros") return ValueKind::kTimestampMicros;
  return std::nullopt;
}

bool value_matches_kind(const Value& v, ValueKind kind) {
  switch (kind) {
    case ValueKind::kInt64:
    case ValueKind::kTimestampMicros:
      return std::holds_alternative<int64_t>(v);
    case ValueKind::kFloat64:
      return std::holds_alternative<double>(v);
    case ValueKind::kString:
      return std::holds_alternative<std::string>(v);
    case ValueKind::kBool:
      return std::holds_alternative<bool>(v);
  }
  return false;
}

int compare_values(const Value& a, const Value& b, ValueKind kind) {
  switch (kind) {
    case ValueKind::kInt64:
    case ValueKind::kTimestampMicros: {
      int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    case ValueKind::kFloat64: {
      double x = std::get<double>(a), y = std::get<double>(b);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    case ValueKind::kString: {
      const std::string& x = std::get<std::string>(a);
      const std::string& y = std::get<std::string>(b);
      int c = x.compare(y);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case ValueKind::kBool: {
      int x = std::get<bool>(a) ? 1 : 0, y = std::get<bool>(b) ? 1 : 0;
      return x - y;
    }
  }
  return 0;
}

namespace {

void append_be64(uint64_t u, std::string& out) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((u >> shift) & 0xFF));
  }
}

}  // namespace

void append_canonical_bytes(const Value& v, ValueKind kind, std::string& out) {
  switch (kind) {
    case ValueKind::kInt64:
    case ValueKind::kTimestampMicros:
      append_be64(static_cast<uint64_t>(std::get<int64_t>(v)), out);
      return;
    case ValueKind::kFloat64: {
      double d = std::get<double>(v);
      if (d == 0.0) d = 0.0;  // -0.0 folds onto +0.0
      uint64_t bits = std::bit_cast<uint64_t>(d);
      if (std::isnan(d)) bits = 0x7FF8000000000000ULL;
      append_be64(bits, out);
      return;
    }
    case ValueKind::kString:
      out += std::get<std::string>(v);
      return;
    case ValueKind::kBool:
      out.push_back(std::get<bool>(v) ? 1 : 0);
      return;
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

std::string format_value(const Value& v, ValueKind kind) {
  if (is_null(v)) return "";
  switch (kind) {
    case ValueKind::kInt64:
    case ValueKind::kTimestampMicros:
      return std::to_string(std::get<int64_t>(v));
    case ValueKind::kFloat64:
      return format_double(std::get<double>(v));
    case ValueKind::kString:
      return std::get<std::string>(v);
    case ValueKind::kBool:
      return std::get<bool>(v) ? "true" : "false";
  }
  return "";
}

Value parse_value(std::string_view raw, bool was_quoted, ValueKind kind) {
  if (raw.empty() && !was_quoted) return std::monostate{};
  switch (kind) {
    case ValueKind::kInt64:
    case ValueKind::kTimestampMicros: {
      int64_t out = 0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), out);
      if (ec != std::errc() || ptr != raw.data() + raw.size()) {
        throw FormatError("not an int64: '" + std::string(raw) + "'");
      }
      return out;
    }
    case ValueKind::kFloat64: {
      double out = 0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), out);
      if (ec != std::errc() || ptr != raw.data() + raw.size()) {
        throw FormatError("not a float64: '" + std::string(raw) + "'");
      }
      return out;
    }
    case ValueKind::kString:
      return std::string(raw);
    case ValueKind::kBool: {
      if (raw == "true") return true;
      if (raw == "false") return false;
      throw FormatError("not a bool: '" + std::string(raw) + "'");
    }
  }
  throw FormatError("unhandled kind");
}

bool is_valid_utf8(std::string_view s) {
  size_t i = 0;
  while (i < s.size()) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    size_t len;
    uint32_t cp;
    if (b0 < 0x80) {
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (size_t j = 1; j < len; ++j) {
      unsigned char b = static_cast<unsigned char>(s[i + j]);
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (len == 2 && cp < 0x80) return false;
    if (len == 3 && cp < 0x800) return false;
    if (len == 4 && cp < 0x10000) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

std::optional<double> value_as_double(const Value& v, ValueKind kind) {
  if (is_null(v)) return std::nullopt;
  switch (kind) {
    case ValueKind::kInt64:
    case ValueKind::kTimestampMicros:
      return static_cast<double>(std::get<int64_t>(v));
    case ValueKind::kFloat64:
      return std::get<double>(v);
    case ValueKind::kBool:
      return std::get<bool>(v) ? 1.0 : 0.0;
    case ValueKind::kString:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace lakedq
