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

// Follower graph: users as vertices, "src follows dst" as directed edges.
//
// Vertex ids are strings compared bytewise. The graph keeps vertices sorted
// by id and edges deduplicated, sorted by (src, dst), each with the number
// of times it appeared in the input.

#ifndef MINIPLEX_GRAPH_GRAPH_H_
#define MINIPLEX_GRAPH_GRAPH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace miniplex::graph {

struct UserRow {
  std::string id;
  std::string username;
};

struct EdgeRow {
  std::string src;
  std::string dst;
};

struct BuildOptions {
  // Dangling edges are an error instead of creating implicit vertices.
  bool strict = false;
  bool allow_self_loops = false;
};

struct BuildStats {
  std::int64_t implicit_vertices = 0;
  std::int64_t duplicate_edges = 0;
  std::int64_t self_loops_dropped = 0;
};

struct Edge {
  std::size_t src = 0;  // vertex index
  std::size_t dst = 0;
  std::int64_t multiplicity = 1;

  bool operator==(const Edge&) const = default;
};

class PropertyGraph {
 public:
  std::size_t vertex_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& usernames() const { return usernames_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const BuildStats& stats() const { return stats_; }

  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  friend PropertyGraph build_graph(const std::vector<UserRow>&, const std::vector<EdgeRow>&,
                                   const BuildOptions&);

  std::vector<std::string> ids_;
  std::vector<std::string> usernames_;
  std::vector<Edge> edges_;
  BuildStats stats_;
};

// Throws Error(kInvalidArgument) on a duplicate user id, or on a dangling
// edge in strict mode.
PropertyGraph build_graph(const std::vector<UserRow>& users, const std::vector<EdgeRow>& follows,
                          const BuildOptions& options = {});

struct DegreeRow {
  std::string id;
  std::string username;
  std::int64_t in_degree = 0;   // followers
  std::int64_t out_degree = 0;  // followees

  bool operator==(const DegreeRow&) const = default;
};

// One row per vertex in id order, counting distinct edges.
std::vector<DegreeRow> degrees(const PropertyGraph& g);

// (vertex id, component id) in vertex id order. Components are weakly
// connected; the component id is the smallest member id.
std::vector<std::pair<std::string, std::string>> weak_components(const PropertyGraph& g);

enum class ExportFormat { kEdgeList, kDot };

std::optional<ExportFormat> parse_export_format(std::string_view name);

// kEdgeList: CSV "src,dst" plus one line per distinct edge.
// kDot: a digraph with every vertex and edge.
std::string export_graph(const PropertyGraph& g, ExportFormat format);
// CSV "id,username", one line per vertex.
std::string export_vertices(const PropertyGraph& g);

// Headered CSV readers; columns are located by name.
std::vector<EdgeRow> parse_follows_csv(std::string_view text);
std::vector<UserRow> parse_users_csv(std::string_view text);

}  // namespace miniplex::graph

#endif  // MINIPLEX_GRAPH_GRAPH_H_
