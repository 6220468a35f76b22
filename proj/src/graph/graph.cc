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

#include "miniplex/graph/graph.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "miniplex/common/csv.h"
#include "miniplex/common/error.h"

namespace miniplex::graph {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Keeps the smaller index as root, so roots are component minima.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::size_t column(const csv::Row& header, std::string_view name, std::string_view what) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " CSV has no '" + std::string(name) + "' column");
  }
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::optional<std::size_t> PropertyGraph::index_of(std::string_view id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

PropertyGraph build_graph(const std::vector<UserRow>& users, const std::vector<EdgeRow>& follows,
                          const BuildOptions& options) {
  std::map<std::string, std::string> vertices;
  for (const auto& u : users) {
    if (!vertices.emplace(u.id, u.username).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate user id: " + u.id);
    }
  }
  PropertyGraph g;
  std::map<std::pair<std::string, std::string>, std::int64_t> edges;
  for (const auto& e : follows) {
    if (e.src == e.dst && !options.allow_self_loops) {
      ++g.stats_.self_loops_dropped;
      continue;
    }
    for (const std::string* end : {&e.src, &e.dst}) {
      if (vertices.count(*end)) continue;
      if (options.strict) {
        throw Error(ErrorCode::kInvalidArgument,
                    "dangling edge " + e.src + " -> " + e.dst + ": unknown vertex " + *end);
      }
      vertices.emplace(*end, "");
      ++g.stats_.implicit_vertices;
    }
    if (++edges[{e.src, e.dst}] > 1) ++g.stats_.duplicate_edges;
  }
  for (auto& [id, name] : vertices) {
    g.ids_.push_back(id);
    g.usernames_.push_back(std::move(name));
  }
  g.edges_.reserve(edges.size());
  for (const auto& [key, count] : edges) {
    g.edges_.push_back({*g.index_of(key.first), *g.index_of(key.second), count});
  }
  return g;
}

std::vector<DegreeRow> degrees(const PropertyGraph& g) {
  std::vector<DegreeRow> rows(g.vertex_count());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].id = g.ids()[i];
    rows[i].username = g.usernames()[i];
  }
  for (const auto& e : g.edges()) {
    ++rows[e.src].out_degree;
    ++rows[e.dst].in_degree;
  }
  return rows;
}

std::vector<std::pair<std::string, std::string>> weak_components(const PropertyGraph& g) {
  UnionFind uf(g.vertex_count());
  for (const auto& e : g.edges()) uf.unite(e.src, e.dst);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(g.vertex_count());
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    out.emplace_back(g.ids()[i], g.ids()[uf.find(i)]);
  }
  return out;
}

std::optional<ExportFormat> parse_export_format(std::string_view name) {
  if (name == "edge-list" || name == "edgelist" || name == "csv") return ExportFormat::kEdgeList;
  if (name == "dot") return ExportFormat::kDot;
  return std::nullopt;
}

std::string export_graph(const PropertyGraph& g, ExportFormat format) {
  const auto& ids = g.ids();
  if (format == ExportFormat::kEdgeList) {
    std::string out = "src,dst\n";
    for (const auto& e : g.edges()) out += csv::format_row({ids[e.src], ids[e.dst]});
    return out;
  }
  std::string out = "digraph follows {\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += "  " + dot_quote(ids[i]);
    if (!g.usernames()[i].empty()) out += " [label=" + dot_quote(g.usernames()[i]) + "]";
    out += ";\n";
  }
  for (const auto& e : g.edges()) {
    out += "  " + dot_quote(ids[e.src]) + " -> " + dot_quote(ids[e.dst]) + ";\n";
  }
  return out + "}\n";
}

std::string export_vertices(const PropertyGraph& g) {
  std::string out = "id,username\n";
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    out += csv::format_row({g.ids()[i], g.usernames()[i]});
  }
  return out;
}

std::vector<EdgeRow> parse_follows_csv(std::string_view text) {
  auto rows = csv::parse(text);
  std::vector<EdgeRow> out;
  if (rows.empty()) return out;
  const std::size_t s = column(rows[0], "src", "follows");
  const std::size_t d = column(rows[0], "dst", "follows");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (std::max(s, d) >= rows[r].size()) {
      throw Error(ErrorCode::kCorruption, "follows CSV row " + std::to_string(r + 1) + " is short");
    }
    out.push_back({rows[r][s], rows[r][d]});
  }
  return out;
}

std::vector<UserRow> parse_users_csv(std::string_view text) {
  auto rows = csv::parse(text);
  std::vector<UserRow> out;
  if (rows.empty()) return out;
  const std::size_t i = column(rows[0], "id", "users");
  const std::size_t u = column(rows[0], "username", "users");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (i >= rows[r].size()) {
      throw Error(ErrorCode::kCorruption, "users CSV row " + std::to_string(r + 1) + " is short");
    }
    out.push_back({rows[r][i], u < rows[r].size() ? rows[r][u] : ""});
  }
  return out;
}

}  // namespace miniplex::graph
