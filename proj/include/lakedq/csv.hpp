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

#include <string>
#include <string_view>
#include <vector>

namespace lakedq::csv {

struct Field {
  std::string text;
  bool quoted = false;
};

using Record = std::vector<Field>;

// Quotes a raw field if needed. An unquoted empty field denotes null, so
// empty non-null strings are emitted as "".
std::string encode_field(std::string_view raw, bool force_quotes);

void append_record(std::string& out, const std::vector<std::string>& raw_fields,
                   const std::vector<bool>& force_quotes);

// Incremental reader; handles quoted fields, doubled quotes, embedded
// newlines and CRLF. The trailing record without a newline is delivered too.
class Parser {
 public:
  // Feeds a chunk; complete records are appended to `out`.
  void feed(std::string_view chunk, std::vector<Record>& out);
  // Flushes the final unterminated record, if any.
  void finish(std::vector<Record>& out);

 private:
  enum class State { kFieldStart, kUnquoted, kQuoted, kQuoteInQuoted };
  State state_ = State::kFieldStart;
  Field field_;
  Record record_;
  bool record_dirty_ = false;

  void end_field();
  void end_record(std::vector<Record>& out);
};

std::vector<Record> parse_string(std::string_view text);

}  // namespace lakedq::csv
