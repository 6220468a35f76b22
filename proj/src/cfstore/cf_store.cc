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

#include "miniplex/cfstore/cf_store.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <unordered_set>
#include <utility>

#include <nlohmann/json.hpp>

#include "miniplex/common/error.h"
#include "miniplex/common/strings.h"
#include "miniplex/dfs/mini_dfs.h"

namespace miniplex::cfstore {
namespace detail {

using CellKey = std::pair<std::string, std::string>;  // (family, qualifier)
using RowCells = std::map<CellKey, std::string>;
using MemTable = std::map<std::string, RowCells>;

struct SegmentRow {
  std::string key;
  RowCells cells;
};

// One on-disk generation. Files are deleted when the last reader lets go of
// a generation that has been replaced or dropped.
struct Segment {
  dfs::MiniDfs* dfs = nullptr;
  std::uint64_t generation = 0;
  std::string index_path;
  std::vector<std::string> first_rows;
  std::vector<std::string> parts;
  bool obsolete = false;

  ~Segment() {
    if (!obsolete) return;
    try {
      for (const auto& p : parts) dfs->remove_file(p);
      dfs->remove_file(index_path);
    } catch (const Error&) {
      // Leftovers are swept when the store is reopened.
    }
  }

  std::vector<SegmentRow> read_part(std::size_t i) const {
    std::vector<SegmentRow> rows;
    for (const auto& line : split_lines(dfs->get_file(parts[i]))) {
      auto f = split(line, '\t');
      if (f.size() != 4) throw Error(ErrorCode::kCorruption, "bad segment line in " + parts[i]);
      std::string key = unescape_field(f[0]);
      if (rows.empty() || rows.back().key != key) rows.push_back({std::move(key), {}});
      rows.back().cells[{unescape_field(f[1]), unescape_field(f[2])}] = unescape_field(f[3]);
    }
    return rows;
  }

  // Part that would hold `row`.
  std::size_t part_for(const std::string& row) const {
    auto it = std::upper_bound(first_rows.begin(), first_rows.end(), row);
    return it == first_rows.begin() ? 0 : static_cast<std::size_t>(it - first_rows.begin()) - 1;
  }
};

struct TableState {
  std::string name;
  std::set<std::string> families;
  std::mutex mu;
  std::shared_ptr<MemTable> active = std::make_shared<MemTable>();
  std::vector<std::shared_ptr<const MemTable>> frozen;  // oldest first
  std::size_t buffered_cells = 0;
  std::shared_ptr<Segment> segment;
  std::uint64_t generation = 0;
  bool dropped = false;
};

struct Snapshot {
  std::shared_ptr<Segment> segment;
  std::vector<std::shared_ptr<const MemTable>> layers;  // oldest first
};

// Merges the segment and memtable layers in row order; later layers win.
class MergeCursor {
 public:
  MergeCursor(Snapshot snap, const std::optional<std::string>& start) : snap_(std::move(snap)) {
    for (const auto& layer : snap_.layers) {
      its_.push_back(start ? layer->lower_bound(*start) : layer->begin());
    }
    if (snap_.segment && !snap_.segment->parts.empty()) {
      part_ = start ? snap_.segment->part_for(*start) : 0;
      load_part();
      if (start) {
        while (!seg_done() && rows_[pos_].key < *start) advance_segment();
      }
    }
  }

  bool next(std::string& key, RowCells& cells) {
    const std::string* min = nullptr;
    if (!seg_done()) min = &rows_[pos_].key;
    for (std::size_t i = 0; i < its_.size(); ++i) {
      if (its_[i] != snap_.layers[i]->end() && (!min || its_[i]->first < *min)) {
        min = &its_[i]->first;
      }
    }
    if (!min) return false;
    key = *min;
    cells.clear();
    if (!seg_done() && rows_[pos_].key == key) {
      cells = std::move(rows_[pos_].cells);
      advance_segment();
    }
    for (std::size_t i = 0; i < its_.size(); ++i) {
      if (its_[i] != snap_.layers[i]->end() && its_[i]->first == key) {
        for (const auto& [k, v] : its_[i]->second) cells[k] = v;
        ++its_[i];
      }
    }
    return true;
  }

 private:
  bool seg_done() const { return pos_ >= rows_.size(); }

  void load_part() {
    rows_ = snap_.segment->read_part(part_);
    pos_ = 0;
  }

  void advance_segment() {
    ++pos_;
    while (pos_ >= rows_.size() && part_ + 1 < snap_.segment->parts.size()) {
      ++part_;
      load_part();
    }
  }

  Snapshot snap_;
  std::vector<MemTable::const_iterator> its_;
  std::vector<SegmentRow> rows_;
  std::size_t part_ = 0;
  std::size_t pos_ = 0;
};

struct ScanState {
  ScanState(Snapshot snap, ScanOptions o)
      : options(std::move(o)), cursor(std::move(snap), options.start_row) {}

  ScanOptions options;
  MergeCursor cursor;
  bool done = false;
};

}  // namespace detail

namespace {

using detail::MemTable;
using detail::RowCells;
using detail::Segment;
using detail::TableState;
using nlohmann::json;

std::string table_dir(const std::string& name) { return "/hbase/" + name + "/"; }
std::string tableinfo_path(const std::string& name) { return table_dir(name) + ".tableinfo"; }

std::string generation_prefix(const std::string& name, std::uint64_t gen) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "data.%06llu", static_cast<unsigned long long>(gen));
  return table_dir(name) + buf;
}

std::string part_path(const std::string& name, std::uint64_t gen, std::size_t part) {
  char buf[16];
  std::snprintf(buf, sizeof buf, ".%05zu", part);
  return generation_prefix(name, gen) + buf;
}

void replace_file(dfs::MiniDfs& dfs, const std::string& path, std::string_view content) {
  if (dfs.exists(path)) dfs.remove_file(path);
  dfs.put_file(path, content);
}

void check_name(std::string_view what, const std::string& name) {
  bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " name is invalid: '" + name + "'");
  }
}

void write_tableinfo(dfs::MiniDfs& dfs, const TableState& t) {
  json j = {{"name", t.name}, {"families", t.families}, {"generation", t.generation}};
  replace_file(dfs, tableinfo_path(t.name), j.dump() + "\n");
}

bool keep_cell(const ScanOptions& o, const detail::CellKey& k) {
  if (!o.family.empty() && k.first != o.family) return false;
  return !o.qualifiers || o.qualifiers->count(k.second) > 0;
}

std::optional<std::string> json_id(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) return std::nullopt;
  if (it->is_string() && !it->get_ref<const std::string&>().empty()) return it->get<std::string>();
  if (it->is_number_integer()) return it->dump();
  return std::nullopt;
}

}  // namespace

Scanner::Scanner(std::unique_ptr<detail::ScanState> state) : state_(std::move(state)) {}
Scanner::Scanner(Scanner&&) noexcept = default;
Scanner& Scanner::operator=(Scanner&&) noexcept = default;
Scanner::~Scanner() = default;

bool Scanner::next(ScanRow& row) {
  if (!state_ || state_->done) return false;
  const ScanOptions& o = state_->options;
  std::string key;
  RowCells cells;
  while (state_->cursor.next(key, cells)) {
    if (o.end_row && key >= *o.end_row) break;
    row.row_key = key;
    row.cells.clear();
    for (auto& [k, v] : cells) {
      if (keep_cell(o, k)) row.cells.push_back({key, k.first, k.second, std::move(v)});
    }
    if (!row.cells.empty()) return true;
  }
  state_->done = true;
  return false;
}

CfStore::CfStore(dfs::MiniDfs& dfs, CfOptions options) : dfs_(dfs), options_(options) {
  if (options_.rows_per_part == 0 || options_.write_buffer_cells == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cfstore options must be positive");
  }
  for (const auto& meta : dfs_.list("/hbase/")) {
    const std::string& p = meta.path;
    if (!std::string_view(p).ends_with("/.tableinfo")) continue;
    json j = json::parse(dfs_.get_file(p));
    auto t = std::make_shared<TableState>();
    t->name = j.at("name").get<std::string>();
    t->families = j.at("families").get<std::set<std::string>>();
    t->generation = j.at("generation").get<std::uint64_t>();
    std::set<std::string> live = {p};
    if (t->generation > 0) {
      auto seg = std::make_shared<Segment>();
      seg->dfs = &dfs_;
      seg->generation = t->generation;
      seg->index_path = generation_prefix(t->name, t->generation) + ".index";
      live.insert(seg->index_path);
      for (const auto& line : split_lines(dfs_.get_file(seg->index_path))) {
        auto f = split(line, '\t');
        if (f.size() != 2) throw Error(ErrorCode::kCorruption, "bad index " + seg->index_path);
        seg->first_rows.push_back(unescape_field(f[0]));
        seg->parts.push_back(f[1]);
        live.insert(f[1]);
      }
      t->segment = std::move(seg);
    }
    // Sweep files of generations that were replaced but never deleted.
    for (const auto& f : dfs_.list(table_dir(t->name))) {
      if (!live.count(f.path)) dfs_.remove_file(f.path);
    }
    tables_[t->name] = std::move(t);
  }
}

CfStore::~CfStore() = default;

std::shared_ptr<TableState> CfStore::find(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = tables_.find(name);
  if (it == tables_.end()) throw Error(ErrorCode::kNotFound, "cf table not found: " + name);
  return it->second;
}

void CfStore::create_table(const std::string& name, const std::set<std::string>& families) {
  check_name("table", name);
  if (families.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cf table " + name + " needs at least one family");
  }
  for (const auto& f : families) check_name("family", f);
  std::lock_guard lock(mu_);
  if (tables_.count(name)) throw Error(ErrorCode::kAlreadyExists, "cf table exists: " + name);
  auto t = std::make_shared<TableState>();
  t->name = name;
  t->families = families;
  for (const auto& stale : dfs_.list(table_dir(name))) dfs_.remove_file(stale.path);
  write_tableinfo(dfs_, *t);
  tables_[name] = std::move(t);
}

void CfStore::drop_table(const std::string& name) {
  std::shared_ptr<TableState> t;
  {
    std::lock_guard lock(mu_);
    auto it = tables_.find(name);
    if (it == tables_.end()) throw Error(ErrorCode::kNotFound, "cf table not found: " + name);
    t = it->second;
    tables_.erase(it);
  }
  std::lock_guard lock(t->mu);
  t->dropped = true;
  dfs_.remove_file(tableinfo_path(name));
  if (t->segment) t->segment->obsolete = true;
  t->segment.reset();
}

bool CfStore::has_table(const std::string& name) const {
  std::lock_guard lock(mu_);
  return tables_.count(name) > 0;
}

std::vector<std::string> CfStore::table_names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> names;
  for (const auto& [n, t] : tables_) names.push_back(n);
  return names;
}

std::set<std::string> CfStore::families(const std::string& table) const {
  return find(table)->families;
}

void CfStore::put(const std::string& table, const std::string& row_key, const std::string& family,
                  const std::string& qualifier, std::string_view value) {
  auto t = find(table);
  if (row_key.empty() || qualifier.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "row key and qualifier must be non-empty");
  }
  if (!t->families.count(family)) {
    throw Error(ErrorCode::kNotFound, "unknown family '" + family + "' in cf table " + table);
  }
  bool full = false;
  {
    std::lock_guard lock(t->mu);
    (*t->active)[row_key][{family, qualifier}] = std::string(value);
    full = ++t->buffered_cells >= options_.write_buffer_cells;
  }
  if (full) flush(table);
}

std::vector<Cell> CfStore::get(const std::string& table, const std::string& row_key) const {
  auto t = find(table);
  detail::Snapshot snap;
  RowCells active_row;
  {
    std::lock_guard lock(t->mu);
    snap.segment = t->segment;
    snap.layers = t->frozen;
    auto it = t->active->find(row_key);
    if (it != t->active->end()) active_row = it->second;
  }
  RowCells cells;
  if (snap.segment && !snap.segment->parts.empty()) {
    for (auto& r : snap.segment->read_part(snap.segment->part_for(row_key))) {
      if (r.key == row_key) {
        cells = std::move(r.cells);
        break;
      }
    }
  }
  for (const auto& layer : snap.layers) {
    auto it = layer->find(row_key);
    if (it == layer->end()) continue;
    for (const auto& [k, v] : it->second) cells[k] = v;
  }
  for (const auto& [k, v] : active_row) cells[k] = v;
  std::vector<Cell> out;
  for (auto& [k, v] : cells) out.push_back({row_key, k.first, k.second, std::move(v)});
  return out;
}

Scanner CfStore::scan(const std::string& table, const ScanOptions& options) const {
  auto t = find(table);
  if (!options.family.empty() && !t->families.count(options.family)) {
    throw Error(ErrorCode::kNotFound,
                "unknown family '" + options.family + "' in cf table " + table);
  }
  detail::Snapshot snap;
  {
    std::lock_guard lock(t->mu);
    if (!t->active->empty()) {
      t->frozen.push_back(std::move(t->active));
      t->active = std::make_shared<MemTable>();
    }
    snap.segment = t->segment;
    snap.layers = t->frozen;
  }
  return Scanner(std::make_unique<detail::ScanState>(std::move(snap), options));
}

void CfStore::flush(const std::string& table) {
  auto t = find(table);
  std::lock_guard lock(t->mu);
  if (t->dropped) return;
  if (t->active->empty() && t->frozen.empty()) return;

  detail::Snapshot snap;
  snap.segment = t->segment;
  snap.layers = t->frozen;
  snap.layers.push_back(t->active);
  detail::MergeCursor cursor(std::move(snap), std::nullopt);

  auto seg = std::make_shared<Segment>();
  seg->dfs = &dfs_;
  seg->generation = t->generation + 1;
  seg->index_path = generation_prefix(table, seg->generation) + ".index";
  std::string part;
  std::size_t rows_in_part = 0;
  std::string index;
  auto close_part = [&] {
    if (rows_in_part == 0) return;
    std::string path = part_path(table, seg->generation, seg->parts.size());
    dfs_.put_file(path, part);
    index += escape_field(seg->first_rows.back()) + "\t" + path + "\n";
    seg->parts.push_back(std::move(path));
    part.clear();
    rows_in_part = 0;
  };
  std::string key;
  RowCells cells;
  while (cursor.next(key, cells)) {
    if (rows_in_part == 0) seg->first_rows.push_back(key);
    const std::string k = escape_field(key);
    for (const auto& [ck, v] : cells) {
      part += k + "\t" + escape_field(ck.first) + "\t" + escape_field(ck.second) + "\t" +
              escape_field(v) + "\n";
    }
    if (++rows_in_part == options_.rows_per_part) close_part();
  }
  close_part();
  dfs_.put_file(seg->index_path, index);

  t->generation = seg->generation;
  write_tableinfo(dfs_, *t);
  if (t->segment) t->segment->obsolete = true;
  t->segment = std::move(seg);
  t->frozen.clear();
  t->active = std::make_shared<MemTable>();
  t->buffered_cells = 0;
}

void CfStore::flush_all() {
  for (const auto& name : table_names()) flush(name);
}

LoadStats CfStore::load_tweets(const std::string& table, std::string_view jsonl) {
  auto t = find(table);
  if (!t->families.count("m")) {
    throw Error(ErrorCode::kFailedPrecondition, "cf table " + table + " has no family 'm'");
  }
  const bool with_text = t->families.count("t") > 0;

  std::unordered_set<std::string> seen;
  {
    Scanner existing = scan(table);
    ScanRow row;
    while (existing.next(row)) seen.insert(row.row_key);
  }

  static constexpr std::pair<const char*, const char*> kMetrics[] = {
      {"impression_count", "impressions"}, {"like_count", "likes"},
      {"quote_count", "quotes"},           {"reply_count", "replies"},
      {"retweet_count", "retweets"}};
  LoadStats stats;
  for (const auto& line : split_lines(jsonl)) {
    if (trim(line).empty()) continue;
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!obj.is_object()) {
      ++stats.malformed;
      continue;
    }
    auto id = json_id(obj, "id");
    auto author = json_id(obj, "author_id");
    if (!id || !author) {
      ++stats.malformed;
      continue;
    }
    if (!seen.insert(*id).second) {
      ++stats.duplicates;
      continue;
    }
    put(table, *id, "m", "author_id", *author);
    auto pm = obj.find("public_metrics");
    for (const auto& [field, qualifier] : kMetrics) {
      if (pm == obj.end() || !pm->is_object()) break;
      auto v = pm->find(field);
      if (v != pm->end() && v->is_number_integer()) put(table, *id, "m", qualifier, v->dump());
    }
    if (with_text) {
      auto text = obj.find("text");
      if (text != obj.end() && text->is_string()) {
        put(table, *id, "t", "text", text->get<std::string>());
      }
    }
    ++stats.loaded;
  }
  return stats;
}

}  // namespace miniplex::cfstore
