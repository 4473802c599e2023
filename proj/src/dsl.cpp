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

#include "lakedq/dsl.hpp"

#include <charconv>
#include <cctype>

#include "lakedq/errors.hpp"

namespace lakedq::dsl {

namespace {

constexpr double kMicrosPerSecond = 1e6;

std::optional<double> unit_micros(std::string_view unit) {
  if (unit == "s" || unit == "sec" || unit == "secs" || unit == "second" || unit == "seconds")
    return kMicrosPerSecond;
  if (unit == "m" || unit == "min" || unit == "mins" || unit == "minute" || unit == "minutes")
    return 60 * kMicrosPerSecond;
  if (unit == "h" || unit == "hr" || unit == "hrs" || unit == "hour" || unit == "hours")
    return 3600 * kMicrosPerSecond;
  if (unit == "d" || unit == "day" || unit == "days") return 86400 * kMicrosPerSecond;
  return std::nullopt;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

double parse_interval_body(const std::string& body, size_t pos) {
  size_t i = 0;
  while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
  size_t num_start = i;
  while (i < body.size() &&
         (std::isdigit(static_cast<unsigned char>(body[i])) || body[i] == '.')) {
    ++i;
  }
  if (num_start == i) throw SyntaxError("interval needs a number", pos);
  double quantity = 0;
  auto [p, ec] = std::from_chars(body.data() + num_start, body.data() + i, quantity);
  if (ec != std::errc() || p != body.data() + i) throw SyntaxError("bad interval number", pos);
  while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
  size_t unit_start = i;
  while (i < body.size() && std::isalpha(static_cast<unsigned char>(body[i]))) ++i;
  std::string unit = body.substr(unit_start, i - unit_start);
  while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
  auto scale = unit_micros(unit);
  if (!scale || i != body.size()) throw SyntaxError("bad interval unit '" + unit + "'", pos);
  return quantity * *scale;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) ||
                                 text[i] == '.' || text[i] == 'e' || text[i] == 'E' ||
                                 ((text[i] == '+' || text[i] == '-') && i > start &&
                                  (text[i - 1] == 'e' || text[i - 1] == 'E')))) {
        ++i;
      }
      double v = 0;
      auto [p, ec] = std::from_chars(text.data() + start, text.data() + i, v);
      if (ec != std::errc() || p != text.data() + i)
        throw SyntaxError("bad number", start);
      // duration shorthand: digits directly followed by a unit (2h, 30m)
      if (i < text.size() && ident_start(text[i])) {
        size_t unit_start = i;
        while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
        auto scale = unit_micros(text.substr(unit_start, i - unit_start));
        if (!scale) throw SyntaxError("bad duration unit", unit_start);
        v *= *scale;
      }
      out.push_back({TokKind::kNumber, std::string(text.substr(start, i - start)), v, start});
      continue;
    }
    if (ident_start(c)) {
      while (i < text.size() && ident_char(text[i])) ++i;
      out.push_back({TokKind::kIdent, std::string(text.substr(start, i - start)), 0, start});
      continue;
    }
    if (c == '\'') {
      ++i;
      size_t body_start = i;
      while (i < text.size() && text[i] != '\'') ++i;
      if (i == text.size()) throw SyntaxError("unterminated string", start);
      out.push_back(
          {TokKind::kString, std::string(text.substr(body_start, i - body_start)), 0, start});
      ++i;
      continue;
    }
    if (c == '<' || c == '>' || c == '=' || c == '!') {
      std::string op(1, c);
      ++i;
      if (i < text.size() && text[i] == '=') {
        op.push_back('=');
        ++i;
      }
      if (op == "=") throw SyntaxError("use == for equality", start);
      if (op == "!") throw SyntaxError("use != for inequality", start);
      out.push_back({TokKind::kOp, op, 0, start});
      continue;
    }
    if (c == '(' || c == ')' || c == ',' || c == '+' || c == '-' || c == '*' || c == '/' ||
        c == '%') {
      out.push_back({TokKind::kOp, std::string(1, c), 0, start});
      ++i;
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", start);
  }
  out.push_back({TokKind::kEnd, "", 0, text.size()});
  return out;
}

const char* cmp_name(CmpOp op) {
  switch (op) {
    case CmpOp::kLt:
      return "<";
    case CmpOp::kLe:
      return "<=";
    case CmpOp::kGt:
      return ">";
    case CmpOp::kGe:
      return ">=";
    case CmpOp::kEq:
      return "==";
    case CmpOp::kNe:
      return "!=";
  }
  return "?";
}

bool cmp_apply(CmpOp op, double lhs, double rhs) {
  switch (op) {
    case CmpOp::kLt:
      return lhs < rhs;
    case CmpOp::kLe:
      return lhs <= rhs;
    case CmpOp::kGt:
      return lhs > rhs;
    case CmpOp::kGe:
      return lhs >= rhs;
    case CmpOp::kEq:
      return lhs == rhs;
    case CmpOp::kNe:
      return lhs != rhs;
  }
  return false;
}

std::optional<CmpOp> cmp_from_text(std::string_view text) {
  if (text == "<") return CmpOp::kLt;
  if (text == "<=") return CmpOp::kLe;
  if (text == ">") return CmpOp::kGt;
  if (text == ">=") return CmpOp::kGe;
  if (text == "==") return CmpOp::kEq;
  if (text == "!=") return CmpOp::kNe;
  return std::nullopt;
}

const Token& Parser::peek() const { return tokens_[next_]; }

const Token& Parser::get() {
  const Token& t = tokens_[next_];
  if (t.kind != TokKind::kEnd) ++next_;
  return t;
}

bool Parser::accept_op(std::string_view op) {
  if (peek().kind == TokKind::kOp && peek().text == op) {
    ++next_;
    return true;
  }
  return false;
}

void Parser::expect_op(std::string_view op) {
  if (!accept_op(op)) {
    throw SyntaxError("expected '" + std::string(op) + "'", peek().pos);
  }
}

bool Parser::at_end() const { return peek().kind == TokKind::kEnd; }

void Parser::expect_end() {
  if (!at_end()) throw SyntaxError("unexpected trailing input", peek().pos);
}

Expr Parser::parse_comparison() {
  Expr lhs = parse_sum();
  const Token& t = peek();
  if (t.kind != TokKind::kOp) throw SyntaxError("expected a comparison operator", t.pos);
  auto cmp = cmp_from_text(t.text);
  if (!cmp) throw SyntaxError("expected a comparison operator", t.pos);
  get();
  Expr rhs = parse_sum();
  Expr out;
  out.kind = Expr::Kind::kCompare;
  out.cmp = *cmp;
  out.pos = t.pos;
  out.args.push_back(std::move(lhs));
  out.args.push_back(std::move(rhs));
  return out;
}

Expr Parser::parse_sum() {
  Expr lhs = parse_product();
  while (peek().kind == TokKind::kOp && (peek().text == "+" || peek().text == "-")) {
    char op = get().text[0];
    Expr rhs = parse_product();
    Expr node;
    node.kind = Expr::Kind::kBinary;
    node.op = op;
    node.args.push_back(std::move(lhs));
    node.args.push_back(std::move(rhs));
    lhs = std::move(node);
  }
  return lhs;
}

Expr Parser::parse_product() {
  Expr lhs = parse_unary();
  while (peek().kind == TokKind::kOp && (peek().text == "*" || peek().text == "/")) {
    char op = get().text[0];
    Expr rhs = parse_unary();
    Expr node;
    node.kind = Expr::Kind::kBinary;
    node.op = op;
    node.args.push_back(std::move(lhs));
    node.args.push_back(std::move(rhs));
    lhs = std::move(node);
  }
  return lhs;
}

Expr Parser::parse_unary() {
  if (accept_op("-")) {
    Expr node;
    node.kind = Expr::Kind::kNegate;
    node.args.push_back(parse_unary());
    return node;
  }
  return parse_primary();
}

Expr Parser::parse_primary() {
  const Token& t = peek();
  if (t.kind == TokKind::kNumber) {
    get();
    Expr e;
    e.kind = Expr::Kind::kNumber;
    e.number = t.number;
    e.pos = t.pos;
    return e;
  }
  if (t.kind == TokKind::kIdent) {
    if (t.text == "interval") {
      get();
      const Token& body = get();
      if (body.kind != TokKind::kString)
        throw SyntaxError("interval needs a quoted body", body.pos);
      Expr e;
      e.kind = Expr::Kind::kNumber;
      e.number = parse_interval_body(body.text, body.pos);
      e.pos = t.pos;
      return e;
    }
    get();
    if (accept_op("(")) {
      Expr call;
      call.kind = Expr::Kind::kCall;
      call.name = t.text;
      call.pos = t.pos;
      if (!accept_op(")")) {
        while (true) {
          call.args.push_back(parse_sum());
          if (accept_op(")")) break;
          expect_op(",");
        }
      }
      return call;
    }
    Expr var;
    var.kind = Expr::Kind::kVar;
    var.name = t.text;
    var.pos = t.pos;
    return var;
  }
  if (t.kind == TokKind::kOp && t.text == "(") {
    get();
    Expr inner = parse_sum();
    expect_op(")");
    return inner;
  }
  throw SyntaxError("expected a value", t.pos);
}

std::optional<double> evaluate(const Expr& e, const Resolver& resolve, std::string* reason) {
  switch (e.kind) {
    case Expr::Kind::kNumber:
      return e.number;
    case Expr::Kind::kVar:
    case Expr::Kind::kCall:
      return resolve(e, reason);
    case Expr::Kind::kNegate: {
      auto v = evaluate(e.args[0], resolve, reason);
      if (!v) return std::nullopt;
      return -*v;
    }
    case Expr::Kind::kBinary: {
      auto l = evaluate(e.args[0], resolve, reason);
      if (!l) return std::nullopt;
      auto r = evaluate(e.args[1], resolve, reason);
      if (!r) return std::nullopt;
      switch (e.op) {
        case '+':
          return *l + *r;
        case '-':
          return *l - *r;
        case '*':
          return *l * *r;
        case '/':
          if (*r == 0.0) {
            if (reason && reason->empty()) *reason = "EmptyAggregate: division by zero";
            return std::nullopt;
          }
          return *l / *r;
      }
      return std::nullopt;
    }
    case Expr::Kind::kCompare: {
      if (reason && reason->empty()) *reason = "nested comparison";
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<bool> evaluate_predicate(const Expr& e, const Resolver& resolve,
                                       std::string* reason) {
  if (e.kind != Expr::Kind::kCompare) {
    if (reason && reason->empty()) *reason = "expression is not a comparison";
    return std::nullopt;
  }
  auto l = evaluate(e.args[0], resolve, reason);
  if (!l) return std::nullopt;
  auto r = evaluate(e.args[1], resolve, reason);
  if (!r) return std::nullopt;
  return cmp_apply(e.cmp, *l, *r);
}

}  // namespace lakedq::dsl
