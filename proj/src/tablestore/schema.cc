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

#include "miniplex/tablestore/schema.h"

#include <set>

#include <nlohmann/json.hpp>

#include "miniplex/common/error.h"
#include "miniplex/tablestore/value.h"

namespace miniplex::tablestore {
namespace {

void collect_leaves(const std::vector<Column>& cols, const std::string& prefix,
                    std::vector<LeafColumn>& out) {
  for (const auto& c : cols) {
    std::string path = prefix.empty() ? c.name : prefix + "." + c.name;
    if (c.type == ColumnType::kRecord) {
      collect_leaves(c.fields, path, out);
    } else {
      out.push_back({path, c.type});
    }
  }
}

void validate_columns(const std::vector<Column>& cols, const std::string& where) {
  std::set<std::string> names;
  for (const auto& c : cols) {
    if (c.name.empty() || c.name.find('.') != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "schema: bad column name in " + where);
    }
    if (!names.insert(c.name).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "schema: duplicate column '" + c.name + "' in " + where);
    }
    if (c.type == ColumnType::kRecord) {
      if (c.fields.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "schema: record '" + c.name + "' has no fields");
      }
      validate_columns(c.fields, c.name);
    }
  }
}

nlohmann::json column_to_json(const Column& c) {
  nlohmann::json j = {{"name", c.name}, {"type", column_type_name(c.type)}};
  if (c.type == ColumnType::kRecord) {
    j["fields"] = nlohmann::json::array();
    for (const auto& f : c.fields) j["fields"].push_back(column_to_json(f));
  }
  return j;
}

Column column_from_json(const nlohmann::json& j) {
  Column c;
  c.name = j.at("name").get<std::string>();
  const auto type = j.at("type").get<std::string>();
  if (type == "int64") {
    c.type = ColumnType::kInt64;
  } else if (type == "text") {
    c.type = ColumnType::kText;
  } else if (type == "record") {
    c.type = ColumnType::kRecord;
    for (const auto& f : j.at("fields")) c.fields.push_back(column_from_json(f));
  } else {
    throw Error(ErrorCode::kInvalidArgument, "schema: unknown column type '" + type + "'");
  }
  return c;
}

}  // namespace

std::string to_display(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return "";
}

std::string_view column_type_name(ColumnType type) {
  switch (type) {
    case ColumnType::kInt64: return "int64";
    case ColumnType::kText: return "text";
    case ColumnType::kRecord: return "record";
  }
  return "?";
}

void TableSchema::validate() const {
  if (name.empty()) throw Error(ErrorCode::kInvalidArgument, "schema: table name is empty");
  if (columns.empty()) throw Error(ErrorCode::kInvalidArgument, "schema: no columns");
  validate_columns(columns, name);
}

std::vector<LeafColumn> TableSchema::leaves() const {
  std::vector<LeafColumn> out;
  collect_leaves(columns, "", out);
  return out;
}

std::optional<std::size_t> TableSchema::leaf_index(std::string_view path) const {
  auto all = leaves();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].path == path) return i;
  }
  return std::nullopt;
}

bool TableSchema::is_record_path(std::string_view path) const {
  const std::vector<Column>* level = &columns;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = path.find('.', start);
    std::string_view part = path.substr(start, dot == std::string_view::npos ? path.npos : dot - start);
    const Column* hit = nullptr;
    for (const auto& c : *level) {
      if (c.name == part) hit = &c;
    }
    if (!hit || hit->type != ColumnType::kRecord) return false;
    if (dot == std::string_view::npos) return true;
    level = &hit->fields;
    start = dot + 1;
  }
}

nlohmann::json schema_to_json(const TableSchema& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema.columns) cols.push_back(column_to_json(c));
  return {{"name", schema.name}, {"columns", std::move(cols)}};
}

TableSchema schema_from_json(const nlohmann::json& j) {
  TableSchema s;
  s.name = j.at("name").get<std::string>();
  for (const auto& c : j.at("columns")) s.columns.push_back(column_from_json(c));
  s.validate();
  return s;
}

}  // namespace miniplex::tablestore
