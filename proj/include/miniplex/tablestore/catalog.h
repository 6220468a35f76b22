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

// Table catalog over minidfs.
//
// External tables are schema-on-read views of a JSON Lines or CSV file; the
// source is parsed at query time and never modified. Internal tables own a
// set of column segments under /warehouse/<table>/, one file per leaf column
// (plain int64 arrays, dictionary-encoded text), which a query reads only
// for the columns it references. Dropping an internal table deletes them.
//
// Catalog metadata is persisted as JSON next to the dfs root when a
// metadata path is given.

#ifndef MINIPLEX_TABLESTORE_CATALOG_H_
#define MINIPLEX_TABLESTORE_CATALOG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "miniplex/tablestore/schema.h"
#include "miniplex/tablestore/sql.h"
#include "miniplex/tablestore/value.h"

namespace miniplex::dfs {
class MiniDfs;
}

namespace miniplex::tablestore {

enum class TableKind { kExternal, kInternal };
enum class SourceFormat { kJsonLines, kCsv };

std::optional<SourceFormat> parse_source_format(std::string_view name);

struct TableInfo {
  TableSchema schema;
  TableKind kind = TableKind::kExternal;
  std::string source;  // dfs file (external) or segment directory (internal)
  SourceFormat format = SourceFormat::kJsonLines;
  std::optional<std::int64_t> row_count;  // known for internal tables
};

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  // Header plus one line per row; NULL renders as an empty field.
  std::string to_csv() const;
};

// Case-insensitive substring predicate on one text column, applied to every
// row before grouping.
struct RowScope {
  std::string column;
  std::string keyword;
};

struct QueryOptions {
  std::optional<RowScope> scope;
};

class Catalog {
 public:
  explicit Catalog(dfs::MiniDfs& dfs, std::filesystem::path metadata_file = {});

  Catalog(const Catalog&) = delete;
  Catalog& operator=(const Catalog&) = delete;

  void create_external_table(const TableSchema& schema, const std::string& source,
                             SourceFormat format);
  // Materializes `source_table` into column segments owned by the new table.
  TableInfo create_internal_table_as(const std::string& name, const std::string& source_table);
  void drop_table(const std::string& name);

  bool has_table(const std::string& name) const;
  TableInfo describe(const std::string& name) const;
  std::vector<std::string> table_names() const;

  // Counts rows, scanning external sources.
  std::int64_t row_count(const std::string& name) const;

  ResultSet execute(const QueryAst& ast, const QueryOptions& options = {}) const;
  ResultSet query(std::string_view sql, const QueryOptions& options = {}) const {
    return execute(parse_sql(sql), options);
  }

  // Row visitor over the given leaf columns (by schema leaf index).
  using RowFn = std::function<void(const std::vector<Value>& row)>;

 private:
  struct Entry {
    TableInfo info;
    // Held shared by running queries, exclusively by drop.
    mutable std::shared_mutex usage;
  };

  std::shared_ptr<Entry> find(const std::string& name) const;
  void scan(const Entry& entry, const std::vector<std::size_t>& leaves, const RowFn& fn) const;
  void scan_external(const TableInfo& info, const std::vector<std::size_t>& leaves,
                     const RowFn& fn) const;
  void scan_internal(const TableInfo& info, const std::vector<std::size_t>& leaves,
                     const RowFn& fn) const;
  void save() const;
  void load();

  dfs::MiniDfs& dfs_;
  std::filesystem::path metadata_file_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> tables_;
};

}  // namespace miniplex::tablestore

#endif  // MINIPLEX_TABLESTORE_CATALOG_H_
