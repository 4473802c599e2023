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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Expression core shared by the constraint language and the row predicates
// of expr(...) rules. Values are float64; durations and timestamps are
// microseconds.

namespace lakedq::dsl {

enum class TokKind { kIdent, kNumber, kString, kOp, kEnd };

struct Token {
  TokKind kind;
  std::string text;   // ident/op text, string body
  double number = 0;  // kNumber only; duration suffixes pre-scaled to micros
  size_t pos = 0;
};

// Number literals accept duration suffixes s/m/h/d (e.g. "2h"), scaled to
// microseconds. Strings are single-quoted. Throws SyntaxError.
std::vector<Token> tokenize(std::string_view text);

// "2 hours", "30 minutes", "45 seconds", "1 day" -> micros. Throws
// SyntaxError (reported at `pos`).
double parse_interval_body(const std::string& body, size_t pos);

enum class CmpOp { kLt, kLe, kGt, kGe, kEq, kNe };
const char* cmp_name(CmpOp op);
bool cmp_apply(CmpOp op, double lhs, double rhs);
std::optional<CmpOp> cmp_from_text(std::string_view text);

struct Expr {
  enum class Kind { kNumber, kVar, kCall, kBinary, kCompare, kNegate };
  Kind kind = Kind::kNumber;
  double number = 0;       // kNumber
  std::string name;        // kVar / kCall
  char op = 0;             // kBinary: + - * /
  CmpOp cmp = CmpOp::kLt;  // kCompare
  std::vector<Expr> args;  // kCall args, kBinary/kCompare operands, kNegate operand
  size_t pos = 0;
};

// Pull-parser over a token stream.
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  // comparison := sum cmp sum
  Expr parse_comparison();
  // sum := product (('+'|'-') product)*
  Expr parse_sum();

  const Token& peek() const;
  const Token& get();
  bool accept_op(std::string_view op);
  void expect_op(std::string_view op);  // SyntaxError
  bool at_end() const;
  void expect_end();

 private:
  Expr parse_product();
  Expr parse_unary();
  Expr parse_primary();

  std::vector<Token> tokens_;
  size_t next_ = 0;
};

// Resolves kVar ("now", row column, ...) and kCall ("null_count(c)", ...)
// leaves. A nullopt result (with *reason set) makes the whole evaluation
// nullopt; so does division by zero.
using Resolver =
    std::function<std::optional<double>(const Expr& leaf, std::string* reason)>;

std::optional<double> evaluate(const Expr& e, const Resolver& resolve, std::string* reason);
// For a kCompare root; nullopt when either side has no value.
std::optional<bool> evaluate_predicate(const Expr& e, const Resolver& resolve,
                                       std::string* reason);

}  // namespace lakedq::dsl
