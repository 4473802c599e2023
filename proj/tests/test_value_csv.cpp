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

#include <cmath>
#include <cstring>
#include <random>

#include <doctest.h>

#include "lakedq/csv.hpp"
#include "lakedq/value.hpp"

using namespace lakedq;

TEST_CASE("value text round trip per kind") {
  CHECK(format_value(Value{int64_t{-42}}, ValueKind::kInt64) == "-42");
  CHECK(parse_value("-42", false, ValueKind::kInt64) == Value{int64_t{-42}});

  Value pi = parse_value("3.141592653589793", false, ValueKind::kFloat64);
  CHECK(std::get<double>(pi) == doctest::Approx(3.141592653589793).epsilon(0));

  CHECK(parse_value("true", false, ValueKind::kBool) == Value{true});
  CHECK(parse_value("false", false, ValueKind::kBool) == Value{false});
  CHECK(format_value(Value{true}, ValueKind::kBool) == "true");

  CHECK(parse_value("1767225600000000", false, ValueKind::kTimestampMicros) ==
        Value{int64_t{1767225600000000}});

  CHECK(parse_value("hello", false, ValueKind::kString) == Value{std::string("hello")});
}

TEST_CASE("null versus empty string") {
  CHECK(is_null(parse_value("", false, ValueKind::kString)));
  CHECK(parse_value("", true, ValueKind::kString) == Value{std::string()});
  CHECK(is_null(parse_value("", false, ValueKind::kInt64)));
  CHECK(is_null(parse_value("", false, ValueKind::kFloat64)));
}

TEST_CASE("malformed fields throw") {
  CHECK_THROWS_AS(parse_value("12x", false, ValueKind::kInt64), FormatError);
  CHECK_THROWS_AS(parse_value("1.5", false, ValueKind::kInt64), FormatError);
  CHECK_THROWS_AS(parse_value("maybe", false, ValueKind::kBool), FormatError);
  CHECK_THROWS_AS(parse_value("abc", false, ValueKind::kFloat64), FormatError);
}

TEST_CASE("format_double is shortest round trip and keeps the sign of zero") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(-0.0) != format_double(0.0));
  double huge = 1e300;
  CHECK(std::stod(format_double(huge)) == huge);
}

TEST_CASE("double text round trips exactly over random values") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    uint64_t bits = rng();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    if (std::isnan(d) || std::isinf(d)) continue;
    Value v = parse_value(format_value(Value{d}, ValueKind::kFloat64), false,
                          ValueKind::kFloat64);
    CHECK(std::get<double>(v) == d);
  }
}

TEST_CASE("canonical bytes fold negative zero and are big-endian") {
  std::string pos, neg;
  append_canonical_bytes(Value{0.0}, ValueKind::kFloat64, pos);
  append_canonical_bytes(Value{-0.0}, ValueKind::kFloat64, neg);
  CHECK(pos == neg);

  std::string one;
  append_canonical_bytes(Value{int64_t{1}}, ValueKind::kInt64, one);
  REQUIRE(one.size() == 8);
  CHECK(static_cast<unsigned char>(one[7]) == 1);
  CHECK(static_cast<unsigned char>(one[0]) == 0);
}

TEST_CASE("value_as_double widens and strings have no numeric view") {
  CHECK(*value_as_double(Value{int64_t{7}}, ValueKind::kInt64) == 7.0);
  CHECK(*value_as_double(Value{true}, ValueKind::kBool) == 1.0);
  CHECK(*value_as_double(Value{int64_t{5}}, ValueKind::kTimestampMicros) == 5.0);
  CHECK(!value_as_double(Value{std::string("x")}, ValueKind::kString).has_value());
}

TEST_CASE("compare_values gives a total order per kind") {
  CHECK(compare_values(Value{int64_t{1}}, Value{int64_t{2}}, ValueKind::kInt64) < 0);
  CHECK(compare_values(Value{std::string("b")}, Value{std::string("a")},
                       ValueKind::kString) > 0);
  CHECK(compare_values(Value{1.5}, Value{1.5}, ValueKind::kFloat64) == 0);
}

TEST_CASE("csv encoding quotes only when needed") {
  CHECK(csv::encode_field("plain", false) == "plain");
  CHECK(csv::encode_field("has,comma", false) == "\"has,comma\"");
  CHECK(csv::encode_field("say \"hi\"", false) == "\"say \"\"hi\"\"\"");
  CHECK(csv::encode_field("line\nbreak", false) == "\"line\nbreak\"");
  CHECK(csv::encode_field("", true) == "\"\"");
  CHECK(csv::encode_field("", false) == "");
}

TEST_CASE("csv parser round trips tricky records") {
  std::string text;
  csv::append_record(text, {"a", "b,c", "d\"e", "", "f\ng"},
                     {false, false, false, true, false});
  csv::append_record(text, {"1", "", "x", "y", "z"}, {false, false, false, false, false});

  csv::Parser parser;
  std::vector<csv::Record> records;
  parser.feed(text, records);
  parser.finish(records);

  REQUIRE(records.size() == 2);
  CHECK(records[0][1].text == "b,c");
  CHECK(records[0][2].text == "d\"e");
  CHECK(records[0][3].text == "");
  CHECK(records[0][3].quoted);
  CHECK(records[0][4].text == "f\ng");
  CHECK(records[1][1].text == "");
  CHECK(!records[1][1].quoted);
}

TEST_CASE("csv parser handles CRLF and a missing final newline") {
  csv::Parser parser;
  std::vector<csv::Record> records;
  parser.feed("a,b\r\nc,d", records);
  parser.finish(records);
  REQUIRE(records.size() == 2);
  CHECK(records[0][0].text == "a");
  CHECK(records[0][1].text == "b");
  CHECK(records[1][1].text == "d");
}

TEST_CASE("csv parser survives chunked feeding at every split point") {
  std::string text;
  csv::append_record(text, {"q\"q", "r,r", ""}, {false, false, true});
  for (size_t split = 0; split <= text.size(); ++split) {
    csv::Parser parser;
    std::vector<csv::Record> records;
    parser.feed(std::string_view(text).substr(0, split), records);
    parser.feed(std::string_view(text).substr(split), records);
    parser.finish(records);
    REQUIRE(records.size() == 1);
    CHECK(records[0][0].text == "q\"q");
    CHECK(records[0][1].text == "r,r");
    CHECK(records[0][2].quoted);
  }
}

TEST_CASE("random values of every kind survive the csv pipeline") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    ValueKind kind = static_cast<ValueKind>(trial % 5);
    Value v;
    switch (kind) {
      case ValueKind::kInt64:
        v = static_cast<int64_t>(rng());
        break;
      case ValueKind::kFloat64:
        v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 1e6 - 5e5;
        break;
      case ValueKind::kString: {
        std::string s;
        size_t n = rng() % 20;
        for (size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('!' + rng() % 90));
        v = s;
        break;
      }
      case ValueKind::kBool:
        v = (rng() & 1) == 1;
        break;
      case ValueKind::kTimestampMicros:
        v = static_cast<int64_t>(rng() % 4102444800000000LL);
        break;
    }
    std::string formatted = format_value(v, kind);
    bool force = kind == ValueKind::kString && std::get<std::string>(v).empty();
    std::string encoded = csv::encode_field(formatted, force);

    csv::Parser parser;
    std::vector<csv::Record> records;
    parser.feed(encoded + "\n", records);
    parser.finish(records);
    REQUIRE(records.size() == 1);
    REQUIRE(records[0].size() == 1);
    Value back = parse_value(records[0][0].text, records[0][0].quoted, kind);
    CHECK(back == v);
  }
}

TEST_CASE("utf8 validation rejects overlongs and surrogates") {
  CHECK(is_valid_utf8("plain ascii"));
  CHECK(is_valid_utf8("\xC3\xA9"));                  // e-acute
  CHECK(is_valid_utf8("\xF0\x9F\x8E\x89"));          // emoji
  CHECK(!is_valid_utf8("\xC0\xAF"));                 // overlong slash
  CHECK(!is_valid_utf8("\xED\xA0\x80"));             // surrogate half
  CHECK(!is_valid_utf8("\xFF"));
  CHECK(!is_valid_utf8(std::string_view("\xC3", 1)));  // truncated sequence
}
