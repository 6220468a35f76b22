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
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "miniplex/common/error.h"
#include "miniplex/graph/graph.h"

namespace {

using miniplex::Error;
using namespace miniplex::graph;
using Components = std::vector<std::pair<std::string, std::string>>;

std::vector<UserRow> users(std::initializer_list<const char*> ids) {
  std::vector<UserRow> out;
  for (const char* id : ids) out.push_back({id, std::string("name_") + id});
  return out;
}

TEST(Graph, BuildBasic) {
  auto g = build_graph(users({"u1", "u2", "u3", "u4"}), {{"u1", "u2"}, {"u3", "u4"}});
  EXPECT_EQ(g.vertex_count(), 4u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.stats().implicit_vertices, 0);
}

TEST(Graph, StrictRejectsDanglingEdge) {
  EXPECT_THROW(build_graph(users({"u1"}), {{"u1", "u9"}}, {.strict = true}), Error);
  auto g = build_graph(users({"u1"}), {{"u1", "u9"}});
  EXPECT_EQ(g.vertex_count(), 2u);
  EXPECT_EQ(g.stats().implicit_vertices, 1);
  EXPECT_EQ(g.usernames()[*g.index_of("u9")], "");
}

TEST(Graph, DuplicateUserRejected) {
  EXPECT_THROW(build_graph({{"u1", "a"}, {"u1", "b"}}, {}), Error);
}

TEST(Graph, DuplicateEdgeKeepsMultiplicity) {
  auto g = build_graph(users({"u1", "u2"}), {{"u1", "u2"}, {"u1", "u2"}});
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edges()[0].multiplicity, 2);
  EXPECT_EQ(g.stats().duplicate_edges, 1);
  EXPECT_EQ(degrees(g)[1].in_degree, 1);
}

TEST(Graph, SelfLoops) {
  auto g = build_graph(users({"u1"}), {{"u1", "u1"}});
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(g.stats().self_loops_dropped, 1);
  auto kept = build_graph(users({"u1"}), {{"u1", "u1"}}, {.allow_self_loops = true});
  EXPECT_EQ(kept.edge_count(), 1u);
}

TEST(Graph, Degrees) {
  auto g = build_graph(users({"u1", "u2", "u3"}), {{"u1", "u2"}, {"u3", "u2"}});
  auto d = degrees(g);
  EXPECT_EQ(d[1], (DegreeRow{"u2", "name_u2", 2, 0}));
  EXPECT_TRUE(degrees(build_graph({}, {})).empty());
  auto tri = build_graph(users({"u1", "u2", "u3"}), {{"u1", "u2"}, {"u2", "u3"}, {"u3", "u1"}});
  for (const auto& row : degrees(tri)) {
    EXPECT_EQ(row.in_degree, 1);
    EXPECT_EQ(row.out_degree, 1);
  }
}

TEST(Graph, Components) {
  auto g = build_graph(users({"u1", "u2", "u3", "u4", "u5"}), {{"u2", "u1"}, {"u3", "u4"}});
  EXPECT_EQ(weak_components(g), (Components{{"u1", "u1"},
                                            {"u2", "u1"},
                                            {"u3", "u3"},
                                            {"u4", "u3"},
                                            {"u5", "u5"}}));
}

TEST(Graph, ExportFormats) {
  auto g = build_graph(users({"b", "a", "c"}), {{"c", "a"}, {"a", "b"}});
  EXPECT_EQ(export_graph(g, ExportFormat::kEdgeList), "src,dst\na,b\nc,a\n");
  EXPECT_EQ(export_graph(build_graph({}, {}), ExportFormat::kEdgeList), "src,dst\n");
  EXPECT_EQ(export_graph(g, ExportFormat::kDot),
            "digraph follows {\n"
            "  \"a\" [label=\"name_a\"];\n"
            "  \"b\" [label=\"name_b\"];\n"
            "  \"c\" [label=\"name_c\"];\n"
            "  \"a\" -> \"b\";\n"
            "  \"c\" -> \"a\";\n"
            "}\n");
  EXPECT_FALSE(parse_export_format("graphml"));
}

TEST(Graph, ExportRoundTrip) {
  auto g = build_graph({{"u1", "alice, a"}, {"u2", "bob"}, {"u3", ""}, {"u4", "dee"}},
                       {{"u1", "u2"}, {"u2", "u3"}, {"u1", "u2"}});
  auto back = build_graph(parse_users_csv(export_vertices(g)),
                          parse_follows_csv(export_graph(g, ExportFormat::kEdgeList)));
  EXPECT_EQ(back.ids(), g.ids());
  EXPECT_EQ(back.usernames(), g.usernames());
  ASSERT_EQ(back.edge_count(), g.edge_count());
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    EXPECT_EQ(back.edges()[i].src, g.edges()[i].src);
    EXPECT_EQ(back.edges()[i].dst, g.edges()[i].dst);
  }
}

TEST(Graph, CsvReaders) {
  auto f = parse_follows_csv("dst,src\nb,a\n");
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].src, "a");
  EXPECT_TRUE(parse_follows_csv("").empty());
  EXPECT_THROW(parse_follows_csv("from,to\na,b\n"), Error);
}

// Components from breadth-first search over the undirected closure.
Components bfs_components(const std::vector<std::string>& ids,
                          const std::vector<EdgeRow>& edges) {
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& id : ids) adj[id];
  for (const auto& e : edges) {
    adj[e.src].insert(e.dst);
    adj[e.dst].insert(e.src);
  }
  std::map<std::string, std::string> comp;
  for (const auto& [start, n] : adj) {
    if (comp.count(start)) continue;
    std::vector<std::string> members;
    std::deque<std::string> q{start};
    std::set<std::string> seen{start};
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      members.push_back(v);
      for (const auto& w : adj[v]) {
        if (seen.insert(w).second) q.push_back(w);
      }
    }
    std::string min = *std::min_element(members.begin(), members.end());
    for (const auto& m : members) comp[m] = min;
  }
  return {comp.begin(), comp.end()};
}

TEST(Graph, ComponentsMatchBfsOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 100);
    const int m = static_cast<int>(rng() % (2 * n + 1));
    std::vector<UserRow> us;
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
      ids.push_back("v" + std::to_string(i));
      us.push_back({ids.back(), ""});
    }
    std::vector<EdgeRow> es;
    for (int j = 0; j < m; ++j) {
      es.push_back({ids[rng() % n], ids[rng() % n]});
    }
    auto g = build_graph(us, es, {.allow_self_loops = true});
    EXPECT_EQ(weak_components(g), bfs_components(ids, es)) << "trial " << trial;

    // Handshake over distinct edges.
    std::set<std::pair<std::string, std::string>> distinct;
    for (const auto& e : es) distinct.insert({e.src, e.dst});
    std::int64_t in = 0, out = 0;
    for (const auto& d : degrees(g)) {
      in += d.in_degree;
      out += d.out_degree;
    }
    EXPECT_EQ(in, static_cast<std::int64_t>(distinct.size()));
    EXPECT_EQ(out, in);
  }
}

// Relabeling vertices relabels components: same partition, ids recomputed
// as the minimum of each relabeled block.
TEST(Graph, ComponentIdsAreCanonical) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 60);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto name = [](int i) { return "x" + std::to_string(1000 + i); };
    std::vector<UserRow> a, b;
    for (int i = 0; i < n; ++i) {
      a.push_back({name(i), ""});
      b.push_back({name(perm[i]), ""});
    }
    std::vector<EdgeRow> ea, eb;
    for (int j = 0; j < n; ++j) {
      int s = static_cast<int>(rng() % n), d = static_cast<int>(rng() % n);
      ea.push_back({name(s), name(d)});
      eb.push_back({name(perm[s]), name(perm[d])});
    }
    auto ca = weak_components(build_graph(a, ea));
    auto cb = weak_components(build_graph(b, eb));
    std::map<std::string, std::string> mb(cb.begin(), cb.end());
    std::map<std::string, std::set<std::string>> blocks_a;
    for (const auto& [v, c] : ca) blocks_a[c].insert(v);
    for (const auto& [c, members] : blocks_a) {
      std::set<std::string> mapped;
      for (const auto& v : members) mapped.insert(name(perm[std::stoi(v.substr(1)) - 1000]));
      const std::string expect_id = *mapped.begin();
      for (const auto& v : mapped) EXPECT_EQ(mb.at(v), expect_id);
    }
  }
}

TEST(Graph, BuildIsDeterministic) {
  std::vector<EdgeRow> es = {{"z", "a"}, {"m", "z"}, {"a", "m"}, {"z", "a"}};
  auto x = build_graph(users({"m", "a"}), es);
  auto y = build_graph(users({"m", "a"}), es);
  EXPECT_EQ(export_graph(x, ExportFormat::kDot), export_graph(y, ExportFormat::kDot));
  EXPECT_EQ(export_vertices(x), export_vertices(y));
}

}  // namespace
