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

#ifndef MINIPLEX_TABLESTORE_SCHEMA_H_
#define MINIPLEX_TABLESTORE_SCHEMA_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace miniplex::tablestore {

enum class ColumnType { kInt64, kText, kRecord };

std::string_view column_type_name(ColumnType type);

struct Column {
  std::string name;
  ColumnType type = ColumnType::kText;
  std::vector<Column> fields;  // kRecord only

  bool operator==(const Column&) const = default;
};

// A scalar column addressed by its dotted path, e.g. "public_metrics.like_count".
struct LeafColumn {
  std::string path;
  ColumnType type;
  bool operator==(const LeafColumn&) const = default;
};

struct TableSchema {
  std::string name;
  std::vector<Column> columns;

  // Throws Error(kInvalidArgument) on duplicate names, empty records or
  // empty identifiers.
  void validate() const;

  // Depth-first, declaration order.
  std::vector<LeafColumn> leaves() const;
  std::optional<std::size_t> leaf_index(std::string_view path) const;
  bool is_record_path(std::string_view path) const;

  bool operator==(const TableSchema&) const = default;
};

nlohmann::json schema_to_json(const TableSchema& schema);
TableSchema schema_from_json(const nlohmann::json& j);

}  // namespace miniplex::tablestore

#endif  // MINIPLEX_TABLESTORE_SCHEMA_H_
