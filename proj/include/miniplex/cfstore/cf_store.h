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

// Sorted row-key store with column families.
//
// Each table keeps an in-memory write buffer over one immutable on-disk
// segment. The segment lives in minidfs under /hbase/<table>/ as a set of
// part files of whole rows, each holding sorted
//
//   row<TAB>family<TAB>qualifier<TAB>value
//
// lines (fields backslash-escaped), plus an index of each part's first row.
// flush() merges the buffer with the current segment into a new generation.
// Writes are last-write-wins; there are no versions or deletes.
//
// A scan freezes the write buffer when it starts and reads that snapshot
// part by part, so concurrent puts are not visible to it and the segment is
// never decoded in full.

#ifndef MINIPLEX_CFSTORE_CF_STORE_H_
#define MINIPLEX_CFSTORE_CF_STORE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace miniplex::dfs {
class MiniDfs;
}

namespace miniplex::cfstore {

struct Cell {
  std::string row_key;
  std::string family;
  std::string qualifier;
  std::string value;

  bool operator==(const Cell&) const = default;
};

struct ScanOptions {
  std::string family;  // empty: all families
  std::optional<std::set<std::string>> qualifiers;
  std::optional<std::string> start_row;  // inclusive
  std::optional<std::string> end_row;    // exclusive
};

struct ScanRow {
  std::string row_key;
  std::vector<Cell> cells;  // sorted by (family, qualifier)
};

struct LoadStats {
  std::int64_t loaded = 0;
  std::int64_t duplicates = 0;
  std::int64_t malformed = 0;
};

struct CfOptions {
  // Puts buffered before an automatic flush.
  std::size_t write_buffer_cells = 1 << 20;
  // Rows per segment part file.
  std::size_t rows_per_part = 4096;
};

namespace detail {
struct TableState;
struct ScanState;
}  // namespace detail

// Forward-only cursor over a snapshot.
class Scanner {
 public:
  Scanner(Scanner&&) noexcept;
  Scanner& operator=(Scanner&&) noexcept;
  ~Scanner();

  // Fills `row` with the next row holding at least one matching cell.
  bool next(ScanRow& row);

 private:
  friend class CfStore;
  explicit Scanner(std::unique_ptr<detail::ScanState> state);
  std::unique_ptr<detail::ScanState> state_;
};

class CfStore {
 public:
  // Reopens every table found under /hbase/.
  explicit CfStore(dfs::MiniDfs& dfs, CfOptions options = {});
  ~CfStore();

  CfStore(const CfStore&) = delete;
  CfStore& operator=(const CfStore&) = delete;

  void create_table(const std::string& name, const std::set<std::string>& families);
  void drop_table(const std::string& name);
  bool has_table(const std::string& name) const;
  std::vector<std::string> table_names() const;
  std::set<std::string> families(const std::string& table) const;

  void put(const std::string& table, const std::string& row_key, const std::string& family,
           const std::string& qualifier, std::string_view value);
  // Cells of one row sorted by (family, qualifier); empty when absent.
  std::vector<Cell> get(const std::string& table, const std::string& row_key) const;
  Scanner scan(const std::string& table, const ScanOptions& options = {}) const;

  // Writes buffered cells into a new segment generation.
  void flush(const std::string& table);
  void flush_all();

  // One row per tweet keyed by tweet id, metrics under family "m" as decimal
  // text (author_id, impressions, likes, quotes, replies, retweets) and, when
  // the table has a "t" family, the tweet text under t:text. Ids already in
  // the table or repeated in the input are skipped and counted.
  LoadStats load_tweets(const std::string& table, std::string_view jsonl);

 private:
  std::shared_ptr<detail::TableState> find(const std::string& name) const;

  dfs::MiniDfs& dfs_;
  CfOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<detail::TableState>> tables_;
};

// Metric qualifiers written by load_tweets, in cell order.
inline constexpr const char* kTweetMetricQualifiers[] = {"impressions", "likes", "quotes",
                                                         "replies", "retweets"};

}  // namespace miniplex::cfstore

#endif  // MINIPLEX_CFSTORE_CF_STORE_H_
