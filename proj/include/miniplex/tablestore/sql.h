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

// The SQL subset understood by the table store:
//
//   SELECT item [, item]*  FROM table
//     [GROUP BY column [, column]*]
//     [ORDER BY expr [ASC|DESC] [, ...]]
//     [LIMIT n] [;]
//
//   item := * | expr [[AS] alias]
//   expr := term [+ term]*
//   term := SUM(expr) | column[.field]* | integer | (expr)
//
// Keywords are case-insensitive. Anything outside this grammar that is a
// recognisable SQL construct (JOIN, WHERE, other aggregates, subqueries, ...)
// is rejected with Error(kUnsupported) naming the construct; other malformed
// input raises Error(kInvalidArgument) with the byte offset.

#ifndef MINIPLEX_TABLESTORE_SQL_H_
#define MINIPLEX_TABLESTORE_SQL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace miniplex::tablestore {

struct Expr {
  enum class Kind { kColumn, kLiteral, kSum, kAdd };

  Kind kind = Kind::kColumn;
  std::string column;         // kColumn: dotted path
  std::int64_t literal = 0;   // kLiteral
  std::vector<Expr> args;     // kSum: 1, kAdd: 2
  std::size_t position = 0;   // byte offset in the query text

  bool contains_aggregate() const;
  // Canonical text, used for default output names.
  std::string to_string() const;
};

struct SelectItem {
  bool star = false;
  Expr expr;
  std::string alias;

  std::string output_name() const { return alias.empty() ? expr.to_string() : alias; }
};

struct OrderItem {
  Expr expr;
  bool descending = false;
};

struct QueryAst {
  std::vector<SelectItem> select;
  std::string from;
  std::vector<std::string> group_by;
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;

  bool is_aggregate() const;
};

QueryAst parse_sql(std::string_view text);

}  // namespace miniplex::tablestore

#endif  // MINIPLEX_TABLESTORE_SQL_H_
