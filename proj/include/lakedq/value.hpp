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
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "lakedq/errors.hpp"

namespace lakedq {

enum class ValueKind : uint8_t {
  kInt64,
  kFloat64,
  kString,
  kBool,
  kTimestampMicros,
};

const char* kind_name(ValueKind kind);
std::optional<ValueKind> kind_from_name(std::string_view name);

inline bool kind_is_numeric(ValueKind k) {
  return k == ValueKind::kInt64 || k == ValueKind::kFloat64;
}

// Timestamps are carried as int64 microseconds; the schema kind disambiguates.
// monostate is null.
using Value = std::variant<std::monostate, int64_t, double, std::string, bool>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

bool value_matches_kind(const Value& v, ValueKind kind);

// Total order within one kind; null and NaN must be filtered out by the caller.
// Returns <0, 0, >0.
int compare_values(const Value& a, const Value& b, ValueKind kind);

// Byte encoding fed to the sketch hash: int64/timestamp as 8-byte big-endian
// two's complement, float64 as the big-endian bit pattern with -0.0 normalized
// to +0.0, strings as UTF-8, bool as one byte.
void append_canonical_bytes(const Value& v, ValueKind kind, std::string& out);

// Plain-text encoding shared by the CSV writer, the CSV reader and the rule
// output. Round-trips doubles exactly (shortest to_chars form).
std::string format_value(const Value& v, ValueKind kind);

// Parses one raw CSV field. An unquoted empty field is null; a quoted empty
// field is the empty string (string columns only). Throws FormatError on
// malformed input.
Value parse_value(std::string_view raw, bool was_quoted, ValueKind kind);

// Numeric view used by rules and constraints: int64/timestamp widen to double,
// bool maps to 0/1. Strings have no numeric view.
std::optional<double> value_as_double(const Value& v, ValueKind kind);

std::string format_double(double v);

// Strict UTF-8 check (rejects overlongs, surrogates, > U+10FFFF). Truncated
// string bounds can hold arbitrary bytes, and JSON can only carry the valid
// ones verbatim.
bool is_valid_utf8(std::string_view s);

}  // namespace lakedq
