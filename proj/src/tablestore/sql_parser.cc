// Copyright 2026 The Miniplex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <array>
#include <cctype>

#include "miniplex/common/error.h"
#include "miniplex/common/strings.h"
#include "miniplex/tablestore/sql.h"

namespace miniplex::tablestore {
namespace {

enum class Tok { kIdent, kNumber, kString, kSymbol, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

constexpr std::array kUnsupportedKeywords = {
    "JOIN",   "WHERE",  "HAVING", "UNION",  "INTERSECT", "EXCEPT", "DISTINCT",
    "INNER",  "LEFT",   "RIGHT",  "FULL",   "OUTER",     "CROSS",  "ON",
    "WITH",   "INSERT", "UPDATE", "DELETE", "CREATE",    "DROP",   "ALTER",
    "OVER",   "CASE",   "OFFSET", "LIKE",   "BETWEEN",   "IN",     "EXISTS",
    "NOT",    "AND",    "OR",     "IS",     "NULL",      "WINDOW", "PARTITION"};

constexpr std::array kReservedKeywords = {"SELECT", "FROM", "GROUP", "BY",  "ORDER",
                                          "ASC",    "DESC", "LIMIT", "AS",  "SUM"};

bool is_keyword_in(std::string_view word, const auto& list) {
  return std::any_of(list.begin(), list.end(),
                     [&](std::string_view k) { return iequals(word, k); });
}

[[noreturn]] void syntax_error(std::size_t pos, const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument,
              "sql: syntax error at position " + std::to_string(pos) + ": " + what);
}

[[noreturn]] void unsupported(std::size_t pos, const std::string& what) {
  throw Error(ErrorCode::kUnsupported,
              "sql: unsupported construct " + what + " at position " + std::to_string(pos));
}

std::vector<Token> lex(std::string_view sql) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < sql.size()) {
    unsigned char c = static_cast<unsigned char>(sql[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (std::isalpha(c) || c == '_') {
      std::size_t start = i;
      while (i < sql.size() &&
             (std::isalnum(static_cast<unsigned char>(sql[i])) || sql[i] == '_')) {
        ++i;
      }
      out.push_back({Tok::kIdent, std::string(sql.substr(start, i - start)), start});
    } else if (std::isdigit(c)) {
      std::size_t start = i;
      while (i < sql.size() && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
      out.push_back({Tok::kNumber, std::string(sql.substr(start, i - start)), start});
    } else if (c == '\'' || c == '"') {
      out.push_back({Tok::kString, std::string(1, static_cast<char>(c)), i});
      ++i;
    } else if (c == '-' && i + 1 < sql.size() && sql[i + 1] == '-') {
      while (i < sql.size() && sql[i] != '\n') ++i;
    } else {
      out.push_back({Tok::kSymbol, std::string(1, static_cast<char>(c)), i});
      ++i;
    }
  }
  out.push_back({Tok::kEnd, "", sql.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view sql) : toks_(lex(sql)) {}

  QueryAst parse() {
    QueryAst ast;
    expect_keyword("SELECT");
    if (peek_keyword("DISTINCT")) unsupported(peek().pos, "DISTINCT");
    do {
      ast.select.push_back(parse_select_item());
    } while (accept_symbol(","));
    expect_keyword("FROM");
    if (peek_symbol("(")) unsupported(peek().pos, "subquery");
    ast.from = expect_identifier("table name");
    if (accept_symbol(",")) unsupported(toks_[pos_ - 1].pos, "multi-table FROM");
    if (peek().kind == Tok::kIdent && !is_clause_keyword(peek().text)) {
      check_unsupported(peek());
      unsupported(peek().pos, "table alias");
    }
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      do {
        std::size_t at = peek().pos;
        Expr e = parse_expr();
        if (e.kind != Expr::Kind::kColumn) syntax_error(at, "GROUP BY expects column names");
        ast.group_by.push_back(e.column);
      } while (accept_symbol(","));
    }
    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      do {
        OrderItem item;
        item.expr = parse_expr();
        if (accept_keyword("DESC")) {
          item.descending = true;
        } else {
          accept_keyword("ASC");
        }
        ast.order_by.push_back(std::move(item));
      } while (accept_symbol(","));
    }
    if (accept_keyword("LIMIT")) {
      const Token& t = next();
      if (t.kind != Tok::kNumber) syntax_error(t.pos, "LIMIT expects a number");
      auto n = parse_int64(t.text);
      if (!n) syntax_error(t.pos, "LIMIT out of range");
      ast.limit = *n;
    }
    accept_symbol(";");
    if (peek().kind != Tok::kEnd) {
      check_unsupported(peek());
      syntax_error(peek().pos, "unexpected '" + peek().text + "'");
    }
    validate(ast);
    return ast;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool peek_keyword(std::string_view kw) const {
    return peek().kind == Tok::kIdent && iequals(peek().text, kw);
  }
  bool peek_symbol(std::string_view s) const {
    return peek().kind == Tok::kSymbol && peek().text == s;
  }
  bool accept_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) return false;
    ++pos_;
    return true;
  }
  bool accept_symbol(std::string_view s) {
    if (!peek_symbol(s)) return false;
    ++pos_;
    return true;
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) {
      check_unsupported(peek());
      syntax_error(peek().pos, "expected " + std::string(kw) + describe_found());
    }
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) {
      check_unsupported(peek());
      syntax_error(peek().pos, "expected '" + std::string(s) + "'" + describe_found());
    }
  }
  std::string describe_found() const {
    if (peek().kind == Tok::kEnd) return ", found end of query";
    return ", found '" + peek().text + "'";
  }
  std::string expect_identifier(std::string_view what) {
    const Token& t = peek();
    if (t.kind != Tok::kIdent || is_keyword_in(t.text, kReservedKeywords)) {
      check_unsupported(t);
      syntax_error(t.pos, "expected " + std::string(what) + describe_found());
    }
    check_unsupported(t);
    ++pos_;
    return t.text;
  }

  static bool is_clause_keyword(std::string_view w) {
    return is_keyword_in(w, kReservedKeywords);
  }

  void check_unsupported(const Token& t) const {
    if (t.kind == Tok::kIdent && is_keyword_in(t.text, kUnsupportedKeywords)) {
      unsupported(t.pos, to_upper(t.text));
    }
    if (t.kind == Tok::kString) unsupported(t.pos, "string literal");
    if (t.kind == Tok::kSymbol &&
        (t.text == "-" || t.text == "*" || t.text == "/" || t.text == "%" || t.text == "=" ||
         t.text == "<" || t.text == ">" || t.text == "|")) {
      unsupported(t.pos, "operator '" + t.text + "'");
    }
  }

  static std::string to_upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }

  SelectItem parse_select_item() {
    SelectItem item;
    if (accept_symbol("*")) {
      item.star = true;
      return item;
    }
    item.expr = parse_expr();
    if (accept_keyword("AS")) {
      item.alias = expect_identifier("alias");
    } else if (peek().kind == Tok::kIdent && !is_clause_keyword(peek().text)) {
      item.alias = expect_identifier("alias");
    }
    return item;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (peek_symbol("+")) {
      std::size_t at = next().pos;
      Expr add;
      add.kind = Expr::Kind::kAdd;
      add.position = at;
      add.args.push_back(std::move(lhs));
      add.args.push_back(parse_term());
      lhs = std::move(add);
    }
    check_unsupported(peek());
    return lhs;
  }

  Expr parse_term() {
    const Token& t = peek();
    Expr e;
    e.position = t.pos;
    if (accept_symbol("(")) {
      if (peek_keyword("SELECT")) unsupported(t.pos, "subquery");
      e = parse_expr();
      expect_symbol(")");
      return e;
    }
    if (t.kind == Tok::kNumber) {
      auto n = parse_int64(t.text);
      if (!n) syntax_error(t.pos, "integer literal out of range");
      ++pos_;
      e.kind = Expr::Kind::kLiteral;
      e.literal = *n;
      return e;
    }
    if (t.kind != Tok::kIdent) {
      check_unsupported(t);
      syntax_error(t.pos, "expected expression" + describe_found());
    }
    check_unsupported(t);
    if (toks_[pos_ + 1].kind == Tok::kSymbol && toks_[pos_ + 1].text == "(") {
      if (!iequals(t.text, "SUM")) unsupported(t.pos, "function " + to_upper(t.text));
      pos_ += 2;
      if (peek_keyword("DISTINCT")) unsupported(peek().pos, "DISTINCT");
      e.kind = Expr::Kind::kSum;
      e.args.push_back(parse_expr());
      expect_symbol(")");
      return e;
    }
    if (is_clause_keyword(t.text)) syntax_error(t.pos, "expected expression, found '" + t.text + "'");
    e.kind = Expr::Kind::kColumn;
    e.column = t.text;
    ++pos_;
    while (peek_symbol(".")) {
      ++pos_;
      const Token& part = peek();
      if (part.kind != Tok::kIdent) {
        syntax_error(part.pos, "expected field name after '.'" + describe_found());
      }
      e.column += "." + part.text;
      ++pos_;
    }
    return e;
  }

  static void check_nested(const Expr& e, bool inside_sum) {
    if (e.kind == Expr::Kind::kSum) {
      if (inside_sum) unsupported(e.position, "nested aggregate");
      check_nested(e.args[0], true);
      return;
    }
    for (const auto& a : e.args) check_nested(a, inside_sum);
  }

  // Column references outside SUM(...).
  static void bare_columns(const Expr& e, std::vector<const Expr*>& out) {
    if (e.kind == Expr::Kind::kSum) return;
    if (e.kind == Expr::Kind::kColumn) out.push_back(&e);
    for (const auto& a : e.args) bare_columns(a, out);
  }

  static void validate(const QueryAst& ast) {
    for (const auto& item : ast.select) {
      if (!item.star) check_nested(item.expr, false);
    }
    for (const auto& o : ast.order_by) check_nested(o.expr, false);
    if (!ast.is_aggregate()) return;
    for (const auto& item : ast.select) {
      if (item.star) {
        throw Error(ErrorCode::kInvalidArgument, "sql: SELECT * cannot be combined with aggregation");
      }
      std::vector<const Expr*> cols;
      bare_columns(item.expr, cols);
      for (const Expr* c : cols) {
        if (std::find(ast.group_by.begin(), ast.group_by.end(), c->column) == ast.group_by.end()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "sql: column '" + c->column + "' at position " + std::to_string(c->position) +
                          " must appear in GROUP BY or inside an aggregate");
        }
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

bool Expr::contains_aggregate() const {
  if (kind == Kind::kSum) return true;
  return std::any_of(args.begin(), args.end(), [](const Expr& a) { return a.contains_aggregate(); });
}

std::string Expr::to_string() const {
  switch (kind) {
    case Kind::kColumn: return column;
    case Kind::kLiteral: return std::to_string(literal);
    case Kind::kSum: return "SUM(" + args[0].to_string() + ")";
    case Kind::kAdd: return args[0].to_string() + " + " + args[1].to_string();
  }
  return "";
}

bool QueryAst::is_aggregate() const {
  if (!group_by.empty()) return true;
  return std::any_of(select.begin(), select.end(), [](const SelectItem& s) {
    return !s.star && s.expr.contains_aggregate();
  });
}

QueryAst parse_sql(std::string_view text) { return Parser(text).parse(); }

}  // namespace miniplex::tablestore
