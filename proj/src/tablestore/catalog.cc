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

#include "miniplex/tablestore/catalog.h"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "column_segment.h"
#include "miniplex/common/csv.h"
#include "miniplex/common/error.h"
#include "miniplex/common/strings.h"
#include "miniplex/dfs/mini_dfs.h"

namespace miniplex::tablestore {
namespace {

using nlohmann::json;

std::string warehouse_dir(const std::string& table) { return "/warehouse/" + table + "/"; }

std::string segment_path(const std::string& table, const std::string& leaf) {
  return warehouse_dir(table) + leaf + ".col";
}

Value json_to_value(const json& v, ColumnType type) {
  if (v.is_null()) return std::monostate{};
  if (type == ColumnType::kInt64) {
    if (v.is_number_integer()) {
      if (v.is_number_unsigned() &&
          v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        return std::monostate{};
      }
      return v.get<std::int64_t>();
    }
    if (v.is_number_float()) {
      double d = v.get<double>();
      auto i = static_cast<std::int64_t>(d);
      if (static_cast<double>(i) == d) return i;
      return std::monostate{};
    }
    if (v.is_string()) {
      if (auto i = parse_int64(v.get_ref<const std::string&>())) return *i;
    }
    return std::monostate{};
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

Value text_to_value(const std::string& field, ColumnType type) {
  if (field.empty()) return std::monostate{};
  if (type == ColumnType::kInt64) {
    if (auto i = parse_int64(field)) return *i;
    return std::monostate{};
  }
  return field;
}

Value add_values(const Value& a, const Value& b, std::size_t pos) {
  if (is_null(a) || is_null(b)) return std::monostate{};
  const auto* x = std::get_if<std::int64_t>(&a);
  const auto* y = std::get_if<std::int64_t>(&b);
  if (!x || !y) {
    throw Error(ErrorCode::kInvalidArgument,
                "sql: type mismatch in '+' at position " + std::to_string(pos));
  }
  return *x + *y;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  std::string h = to_lower_ascii(haystack);
  return h.find(to_lower_ascii(needle)) != std::string::npos;
}

void collect_columns(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Kind::kColumn) out.push_back(e.column);
  for (const auto& a : e.args) collect_columns(a, out);
}

void collect_sums(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::kSum) {
    out.push_back(&e);
    return;
  }
  for (const auto& a : e.args) collect_sums(a, out);
}

struct SumState {
  bool any = false;
  std::int64_t total = 0;
};

// Column lookup shared by the row and group evaluators.
struct Bindings {
  std::unordered_map<std::string, std::size_t> slot;  // path -> row position

  std::size_t at(const std::string& path) const { return slot.at(path); }
};

Value eval_row(const Expr& e, const Bindings& b, const std::vector<Value>& row) {
  switch (e.kind) {
    case Expr::Kind::kColumn: return row[b.at(e.column)];
    case Expr::Kind::kLiteral: return e.literal;
    case Expr::Kind::kAdd:
      return add_values(eval_row(e.args[0], b, row), eval_row(e.args[1], b, row), e.position);
    case Expr::Kind::kSum: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "sql: aggregate in row context");
}

struct GroupEval {
  const std::vector<std::string>* group_by;
  const std::unordered_map<const Expr*, std::size_t>* sum_index;

  Value operator()(const Expr& e, const std::vector<Value>& key,
                   const std::vector<SumState>& sums) const {
    switch (e.kind) {
      case Expr::Kind::kColumn: {
        auto it = std::find(group_by->begin(), group_by->end(), e.column);
        return key[static_cast<std::size_t>(it - group_by->begin())];
      }
      case Expr::Kind::kLiteral: return e.literal;
      case Expr::Kind::kAdd:
        return add_values((*this)(e.args[0], key, sums), (*this)(e.args[1], key, sums),
                          e.position);
      case Expr::Kind::kSum: {
        const SumState& s = sums[sum_index->at(&e)];
        if (!s.any) return std::monostate{};
        return s.total;
      }
    }
    return std::monostate{};
  }
};

std::string format_name(SourceFormat f) { return f == SourceFormat::kCsv ? "csv" : "jsonl"; }

}  // namespace

std::optional<SourceFormat> parse_source_format(std::string_view name) {
  if (name == "jsonl" || name == "json") return SourceFormat::kJsonLines;
  if (name == "csv") return SourceFormat::kCsv;
  return std::nullopt;
}

std::string ResultSet::to_csv() const {
  std::string out = csv::format_row(columns);
  for (const auto& row : rows) {
    csv::Row fields;
    fields.reserve(row.size());
    for (const auto& v : row) fields.push_back(to_display(v));
    out += csv::format_row(fields);
  }
  return out;
}

Catalog::Catalog(dfs::MiniDfs& dfs, std::filesystem::path metadata_file)
    : dfs_(dfs), metadata_file_(std::move(metadata_file)) {
  load();
}

void Catalog::load() {
  if (metadata_file_.empty() || !std::filesystem::exists(metadata_file_)) return;
  json j = json::parse(read_local_file(metadata_file_));
  for (const auto& t : j.at("tables")) {
    auto entry = std::make_shared<Entry>();
    entry->info.schema = schema_from_json(t.at("schema"));
    entry->info.kind = t.at("kind") == "internal" ? TableKind::kInternal : TableKind::kExternal;
    entry->info.source = t.at("source").get<std::string>();
    entry->info.format = *parse_source_format(t.at("format").get<std::string>());
    if (t.contains("row_count")) entry->info.row_count = t.at("row_count").get<std::int64_t>();
    tables_[entry->info.schema.name] = std::move(entry);
  }
}

void Catalog::save() const {
  if (metadata_file_.empty()) return;
  json tables = json::array();
  for (const auto& [name, entry] : tables_) {
    const TableInfo& info = entry->info;
    json t = {{"schema", schema_to_json(info.schema)},
              {"kind", info.kind == TableKind::kInternal ? "internal" : "external"},
              {"source", info.source},
              {"format", format_name(info.format)}};
    if (info.row_count) t["row_count"] = *info.row_count;
    tables.push_back(std::move(t));
  }
  write_local_file(metadata_file_, json{{"tables", std::move(tables)}}.dump(2) + "\n");
}

std::shared_ptr<Catalog::Entry> Catalog::find(const std::string& name) const {
  std::shared_lock lock(mu_);
  auto it = tables_.find(name);
  if (it == tables_.end()) throw Error(ErrorCode::kNotFound, "table not found: " + name);
  return it->second;
}

void Catalog::create_external_table(const TableSchema& schema, const std::string& source,
                                    SourceFormat format) {
  schema.validate();
  if (!dfs_.exists(source)) {
    throw Error(ErrorCode::kNotFound, "external table source not found: " + source);
  }
  std::unique_lock lock(mu_);
  if (tables_.count(schema.name)) {
    throw Error(ErrorCode::kAlreadyExists, "table already exists: " + schema.name);
  }
  auto entry = std::make_shared<Entry>();
  entry->info = {schema, TableKind::kExternal, source, format, std::nullopt};
  tables_[schema.name] = std::move(entry);
  save();
}

TableInfo Catalog::create_internal_table_as(const std::string& name,
                                            const std::string& source_table) {
  {
    std::shared_lock lock(mu_);
    if (tables_.count(name)) throw Error(ErrorCode::kAlreadyExists, "table already exists: " + name);
  }
  auto source = find(source_table);
  TableSchema schema = source->info.schema;
  schema.name = name;
  schema.validate();
  const auto leaves = schema.leaves();
  std::vector<std::size_t> all(leaves.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  std::vector<std::vector<Value>> columns(leaves.size());
  {
    std::shared_lock use(source->usage);
    scan(*source, all, [&](const std::vector<Value>& row) {
      for (std::size_t i = 0; i < row.size(); ++i) columns[i].push_back(row[i]);
    });
  }
  const std::int64_t rows = leaves.empty() ? 0 : static_cast<std::int64_t>(columns[0].size());

  std::unique_lock lock(mu_);
  if (tables_.count(name)) throw Error(ErrorCode::kAlreadyExists, "table already exists: " + name);
  for (const auto& stale : dfs_.list(warehouse_dir(name))) dfs_.remove_file(stale.path);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    auto seg = ColumnSegment::build(leaves[i].type, columns[i]);
    dfs_.put_file(segment_path(name, leaves[i].path), seg.encode());
  }
  auto entry = std::make_shared<Entry>();
  entry->info = {schema, TableKind::kInternal, warehouse_dir(name), SourceFormat::kJsonLines, rows};
  tables_[name] = entry;
  save();
  return entry->info;
}

void Catalog::drop_table(const std::string& name) {
  std::shared_ptr<Entry> entry;
  {
    std::unique_lock lock(mu_);
    auto it = tables_.find(name);
    if (it == tables_.end()) throw Error(ErrorCode::kNotFound, "table not found: " + name);
    entry = it->second;
    tables_.erase(it);
    save();
  }
  // Wait for running queries on this table to finish.
  std::unique_lock use(entry->usage);
  if (entry->info.kind == TableKind::kInternal) {
    for (const auto& seg : dfs_.list(warehouse_dir(name))) dfs_.remove_file(seg.path);
  }
}

bool Catalog::has_table(const std::string& name) const {
  std::shared_lock lock(mu_);
  return tables_.count(name) > 0;
}

TableInfo Catalog::describe(const std::string& name) const { return find(name)->info; }

std::vector<std::string> Catalog::table_names() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> names;
  for (const auto& [name, e] : tables_) names.push_back(name);
  return names;
}

std::int64_t Catalog::row_count(const std::string& name) const {
  auto entry = find(name);
  std::shared_lock use(entry->usage);
  if (entry->info.row_count) return *entry->info.row_count;
  std::int64_t n = 0;
  scan(*entry, {}, [&](const std::vector<Value>&) { ++n; });
  return n;
}

void Catalog::scan(const Entry& entry, const std::vector<std::size_t>& leaves,
                   const RowFn& fn) const {
  if (entry.info.kind == TableKind::kInternal) {
    scan_internal(entry.info, leaves, fn);
  } else {
    scan_external(entry.info, leaves, fn);
  }
}

void Catalog::scan_external(const TableInfo& info, const std::vector<std::size_t>& leaves,
                            const RowFn& fn) const {
  const auto all = info.schema.leaves();
  const std::string content = dfs_.get_file(info.source);
  std::vector<Value> row(leaves.size());

  if (info.format == SourceFormat::kCsv) {
    auto records = csv::parse(content);
    if (records.empty()) return;
    std::vector<std::optional<std::size_t>> field_of(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const auto& header = records[0];
      auto it = std::find(header.begin(), header.end(), all[leaves[i]].path);
      if (it != header.end()) field_of[i] = static_cast<std::size_t>(it - header.begin());
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        const auto& fields = records[r];
        row[i] = field_of[i] && *field_of[i] < fields.size()
                     ? text_to_value(fields[*field_of[i]], all[leaves[i]].type)
                     : Value{};
      }
      fn(row);
    }
    return;
  }

  std::vector<std::vector<std::string>> paths;
  for (auto leaf : leaves) paths.push_back(split(all[leaf].path, '.'));
  std::size_t line_no = 0;
  for (const auto& line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!obj.is_object()) {
      throw Error(ErrorCode::kCorruption, "table " + info.schema.name + ": line " +
                                              std::to_string(line_no) + " is not a JSON object");
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const json* cur = &obj;
      for (const auto& part : paths[i]) {
        if (!cur->is_object()) {
          cur = nullptr;
          break;
        }
        auto it = cur->find(part);
        cur = it == cur->end() ? nullptr : &*it;
        if (!cur) break;
      }
      row[i] = cur ? json_to_value(*cur, all[leaves[i]].type) : Value{};
    }
    fn(row);
  }
}

void Catalog::scan_internal(const TableInfo& info, const std::vector<std::size_t>& leaves,
                            const RowFn& fn) const {
  const auto all = info.schema.leaves();
  std::vector<ColumnSegment> segments;
  segments.reserve(leaves.size());
  for (auto leaf : leaves) {
    segments.push_back(
        ColumnSegment::decode(dfs_.get_file(segment_path(info.schema.name, all[leaf].path))));
  }
  const auto rows = static_cast<std::size_t>(info.row_count.value_or(0));
  for (const auto& s : segments) {
    if (s.size() != rows) throw Error(ErrorCode::kCorruption, "segment row count mismatch");
  }
  std::vector<Value> row(leaves.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < segments.size(); ++i) row[i] = segments[i].at(r);
    fn(row);
  }
}

ResultSet Catalog::execute(const QueryAst& ast, const QueryOptions& options) const {
  auto entry = find(ast.from);
  std::shared_lock use(entry->usage);
  const TableSchema& schema = entry->info.schema;
  const auto all_leaves = schema.leaves();

  // Expand SELECT * and resolve output names.
  std::vector<SelectItem> select;
  for (const auto& item : ast.select) {
    if (!item.star) {
      select.push_back(item);
      continue;
    }
    for (const auto& leaf : all_leaves) {
      SelectItem s;
      s.expr.kind = Expr::Kind::kColumn;
      s.expr.column = leaf.path;
      select.push_back(std::move(s));
    }
  }
  ResultSet result;
  for (const auto& s : select) result.columns.push_back(s.output_name());

  // ORDER BY items naming an output column sort on that column.
  std::vector<std::optional<std::size_t>> order_output(ast.order_by.size());
  for (std::size_t i = 0; i < ast.order_by.size(); ++i) {
    const Expr& e = ast.order_by[i].expr;
    if (e.kind != Expr::Kind::kColumn) continue;
    for (std::size_t c = 0; c < select.size(); ++c) {
      if (result.columns[c] == e.column) {
        order_output[i] = c;
        break;
      }
    }
  }

  // Columns the scan must produce.
  std::vector<std::string> referenced;
  for (const auto& s : select) collect_columns(s.expr, referenced);
  for (std::size_t i = 0; i < ast.order_by.size(); ++i) {
    if (!order_output[i]) collect_columns(ast.order_by[i].expr, referenced);
  }
  referenced.insert(referenced.end(), ast.group_by.begin(), ast.group_by.end());
  if (options.scope) referenced.push_back(options.scope->column);
  Bindings bindings;
  std::vector<std::size_t> scan_leaves;
  for (const auto& path : referenced) {
    if (bindings.slot.count(path)) continue;
    auto idx = schema.leaf_index(path);
    if (!idx) {
      if (schema.is_record_path(path)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "sql: '" + path + "' is a record; select one of its fields");
      }
      throw Error(ErrorCode::kNotFound, "sql: unknown column '" + path + "' in " + ast.from);
    }
    bindings.slot[path] = scan_leaves.size();
    scan_leaves.push_back(*idx);
  }
  std::optional<std::size_t> scope_slot;
  if (options.scope) {
    scope_slot = bindings.at(options.scope->column);
    if (all_leaves[scan_leaves[*scope_slot]].type != ColumnType::kText) {
      throw Error(ErrorCode::kInvalidArgument, "scope column must be text");
    }
  }
  auto in_scope = [&](const std::vector<Value>& row) {
    if (!scope_slot) return true;
    const auto* s = std::get_if<std::string>(&row[*scope_slot]);
    return s && contains_ci(*s, options.scope->keyword);
  };

  // Rows paired with their sort keys; for aggregates the scan feeds groups.
  struct OutRow {
    std::vector<Value> values;
    std::vector<Value> sort_key;
  };
  std::vector<OutRow> out;

  if (!ast.is_aggregate()) {
    scan(*entry, scan_leaves, [&](const std::vector<Value>& row) {
      if (!in_scope(row)) return;
      OutRow o;
      for (const auto& s : select) o.values.push_back(eval_row(s.expr, bindings, row));
      for (std::size_t i = 0; i < ast.order_by.size(); ++i) {
        o.sort_key.push_back(order_output[i] ? o.values[*order_output[i]]
                                             : eval_row(ast.order_by[i].expr, bindings, row));
      }
      out.push_back(std::move(o));
    });
  } else {
    std::vector<const Expr*> sums;
    for (const auto& s : select) collect_sums(s.expr, sums);
    for (std::size_t i = 0; i < ast.order_by.size(); ++i) {
      if (!order_output[i]) collect_sums(ast.order_by[i].expr, sums);
    }
    std::unordered_map<const Expr*, std::size_t> sum_index;
    for (std::size_t i = 0; i < sums.size(); ++i) sum_index[sums[i]] = i;
    for (std::size_t i = 0; i < ast.order_by.size(); ++i) {
      if (order_output[i]) continue;
      // Bare columns in an aggregate ORDER BY must be grouping columns.
      std::vector<std::string> bare;
      std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.kind == Expr::Kind::kSum) return;
        if (e.kind == Expr::Kind::kColumn) bare.push_back(e.column);
        for (const auto& a : e.args) walk(a);
      };
      walk(ast.order_by[i].expr);
      for (const auto& c : bare) {
        if (std::find(ast.group_by.begin(), ast.group_by.end(), c) == ast.group_by.end()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "sql: ORDER BY column '" + c + "' is neither grouped nor selected");
        }
      }
    }

    std::vector<std::size_t> key_slots;
    for (const auto& g : ast.group_by) key_slots.push_back(bindings.at(g));
    std::map<std::vector<Value>, std::vector<SumState>> groups;
    if (ast.group_by.empty()) groups[{}] = std::vector<SumState>(sums.size());
    std::vector<Value> key(key_slots.size());
    scan(*entry, scan_leaves, [&](const std::vector<Value>& row) {
      if (!in_scope(row)) return;
      for (std::size_t k = 0; k < key_slots.size(); ++k) key[k] = row[key_slots[k]];
      auto it = groups.find(key);
      if (it == groups.end()) it = groups.emplace(key, std::vector<SumState>(sums.size())).first;
      for (std::size_t s = 0; s < sums.size(); ++s) {
        Value v = eval_row(sums[s]->args[0], bindings, row);
        if (is_null(v)) continue;
        const auto* i = std::get_if<std::int64_t>(&v);
        if (!i) {
          throw Error(ErrorCode::kInvalidArgument,
                      "sql: SUM over non-integer value at position " +
                          std::to_string(sums[s]->position));
        }
        it->second[s].any = true;
        it->second[s].total += *i;
      }
    });
    GroupEval eval{&ast.group_by, &sum_index};
    for (const auto& [gkey, state] : groups) {
      OutRow o;
      for (const auto& s : select) o.values.push_back(eval(s.expr, gkey, state));
      for (std::size_t i = 0; i < ast.order_by.size(); ++i) {
        o.sort_key.push_back(order_output[i] ? o.values[*order_output[i]]
                                             : eval(ast.order_by[i].expr, gkey, state));
      }
      out.push_back(std::move(o));
    }
  }

  // Groups arrive in ascending key order, so a stable sort leaves ties
  // ordered by group key.
  if (!ast.order_by.empty()) {
    std::stable_sort(out.begin(), out.end(), [&](const OutRow& a, const OutRow& b) {
      for (std::size_t i = 0; i < ast.order_by.size(); ++i) {
        const Value& x = a.sort_key[i];
        const Value& y = b.sort_key[i];
        if (x == y) continue;
        return ast.order_by[i].descending ? y < x : x < y;
      }
      return false;
    });
  }
  std::size_t limit = out.size();
  if (ast.limit) limit = std::min<std::size_t>(limit, static_cast<std::size_t>(std::max<std::int64_t>(*ast.limit, 0)));
  result.rows.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) result.rows.push_back(std::move(out[i].values));
  return result;
}

}  // namespace miniplex::tablestore
