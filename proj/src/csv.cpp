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

#include "lakedq/csv.hpp"

namespace lakedq::csv {

std::string encode_field(std::string_view raw, bool force_quotes) {
  bool needs_quotes = force_quotes;
  for (char c : raw) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(raw);
  std::string out;
  out.reserve(raw.size() + 2);
  out.push_back('"');
  for (char c : raw) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void append_record(std::string& out, const std::vector<std::string>& raw_fields,
                   const std::vector<bool>& force_quotes) {
  for (size_t i = 0; i < raw_fields.size(); ++i) {
    if (i) out.push_back(',');
    out += encode_field(raw_fields[i], i < force_quotes.size() && force_quotes[i]);
  }
  out.push_back('\n');
}

void Parser::end_field() {
  record_.push_back(std::move(field_));
  field_ = Field{};
  record_dirty_ = true;
}

void Parser::end_record(std::vector<Record>& out) {
  end_field();
  out.push_back(std::move(record_));
  record_ = Record{};
  record_dirty_ = false;
}

void Parser::feed(std::string_view chunk, std::vector<Record>& out) {
  for (char c : chunk) {
    switch (state_) {
      case State::kFieldStart:
        if (c == '"') {
          field_.quoted = true;
          state_ = State::kQuoted;
        } else if (c == ',') {
          end_field();
        } else if (c == '\n') {
          if (record_dirty_ || !field_.text.empty()) end_record(out);
          // bare newline with nothing pending: skip (blank line)
          else if (!record_.empty()) end_record(out);
        } else if (c == '\r') {
          // swallowed; the following '\n' terminates the record
        } else {
          field_.text.push_back(c);
          state_ = State::kUnquoted;
        }
        break;
      case State::kUnquoted:
        if (c == ',') {
          end_field();
          state_ = State::kFieldStart;
        } else if (c == '\n') {
          if (!field_.text.empty() && field_.text.back() == '\r') field_.text.pop_back();
          end_record(out);
          state_ = State::kFieldStart;
        } else {
          field_.text.push_back(c);
        }
        break;
      case State::kQuoted:
        if (c == '"') {
          state_ = State::kQuoteInQuoted;
        } else {
          field_.text.push_back(c);
        }
        break;
      case State::kQuoteInQuoted:
        if (c == '"') {
          field_.text.push_back('"');
          state_ = State::kQuoted;
        } else if (c == ',') {
          end_field();
          state_ = State::kFieldStart;
        } else if (c == '\n') {
          end_record(out);
          state_ = State::kFieldStart;
        } else if (c == '\r') {
          // swallow CR of CRLF after closing quote
        } else {
          // stray character after closing quote; keep it, lenient
          field_.text.push_back(c);
        }
        break;
    }
  }
}

void Parser::finish(std::vector<Record>& out) {
  if (state_ != State::kFieldStart || record_dirty_ || !field_.text.empty() || field_.quoted) {
    end_record(out);
  }
  state_ = State::kFieldStart;
}

std::vector<Record> parse_string(std::string_view text) {
  Parser p;
  std::vector<Record> out;
  p.feed(text, out);
  p.finish(out);
  return out;
}

}  // namespace lakedq::csv
