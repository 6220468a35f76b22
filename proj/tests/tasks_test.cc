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
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "miniplex/cfstore/cf_store.h"
#include "miniplex/common/error.h"
#include "miniplex/dfs/mini_dfs.h"
#include "miniplex/ingest/ingest.h"
#include "miniplex/tablestore/catalog.h"
#include "miniplex/tasks/tasks.h"
#include "test_util.h"

namespace {

using miniplex::Error;
using namespace miniplex::tasks;
using miniplex::cfstore::CfStore;
using miniplex::dfs::MiniDfs;
using miniplex::ingest::Ingestor;
using miniplex::tablestore::Catalog;
using miniplex::testing::TempDir;

std::string tweet(const std::string& id, const std::string& author, int imp, int like, int quote,
                  int reply, int rt, const std::string& text = "x") {
  return R"({"id":")" + id + R"(","author_id":")" + author + R"(","text":")" + text +
         R"(","public_metrics":{"impression_count":)" + std::to_string(imp) +
         R"(,"like_count":)" + std::to_string(like) + R"(,"quote_count":)" +
         std::to_string(quote) + R"(,"reply_count":)" + std::to_string(reply) +
         R"(,"retweet_count":)" + std::to_string(rt) + "}}\n";
}

class TasksTest : public ::testing::Test {
 protected:
  TasksTest()
      : dfs_(dir_ / "dfs", {3, 1 << 20, 2}),
        catalog_(dfs_),
        cf_(dfs_),
        ingestor_(dfs_, [] { return std::string("T"); }) {}

  miniplex::ingest::BatchManifest load(const std::string& raw) {
    auto m = ingestor_.preprocess(ingestor_.land_bytes(raw).batch_id);
    miniplex::ingest::load_all(dfs_, catalog_, cf_, m);
    return m;
  }

  std::vector<InfluenceRow> influence(InfluenceEngine e, Formula f,
                                      std::optional<std::string> scope = {}) {
    return task_influence(catalog_, cf_, {e, f, std::move(scope)});
  }

  TempDir dir_;
  MiniDfs dfs_;
  Catalog catalog_;
  CfStore cf_;
  Ingestor ingestor_;
};

const std::string kFixture = tweet("t1", "u1", 100, 10, 1, 2, 5) +
                             tweet("t2", "u1", 50, 5, 0, 1, 2) + tweet("t3", "u2", 10, 1, 0, 0, 0);

constexpr InfluenceEngine kEngines[] = {InfluenceEngine::kSqlExternal,
                                        InfluenceEngine::kSqlInternal, InfluenceEngine::kCfScan};

TEST_F(TasksTest, InfluenceFixtureAllEngines) {
  load(kFixture);
  for (auto e : kEngines) {
    auto verbatim = influence(e, Formula::kVerbatim);
    ASSERT_EQ(verbatim.size(), 2u) << engine_name(e);
    EXPECT_EQ(verbatim[0], (InfluenceRow{"u1", 150, 15, 1, 3, 7, 190})) << engine_name(e);
    EXPECT_EQ(verbatim[1], (InfluenceRow{"u2", 10, 1, 0, 0, 0, 12})) << engine_name(e);
    auto prose = influence(e, Formula::kProse);
    EXPECT_EQ(prose[0].influence, 176);
    EXPECT_EQ(prose[1].influence, 11);
  }
  EXPECT_EQ(influence_csv(influence(InfluenceEngine::kCfScan, Formula::kVerbatim)),
            "author_id,impressions,likes,quotes,replies,retweets,influence\n"
            "u1,150,15,1,3,7,190\n"
            "u2,10,1,0,0,0,12\n");
}

TEST_F(TasksTest, InfluenceEmpty) {
  load("");
  for (auto e : kEngines) EXPECT_TRUE(influence(e, Formula::kProse).empty());
}

TEST_F(TasksTest, InfluenceNotLoaded) {
  EXPECT_THROW(influence(InfluenceEngine::kCfScan, Formula::kProse), Error);
  EXPECT_THROW(influence(InfluenceEngine::kSqlExternal, Formula::kProse), Error);
}

TEST_F(TasksTest, InfluenceScope) {
  load(tweet("a", "u1", 1, 0, 0, 0, 0, "Joel and Ellie") + tweet("b", "u1", 2, 0, 0, 0, 0, "rain") +
       tweet("c", "u2", 4, 0, 0, 0, 0, "ELLIE again"));
  for (auto e : kEngines) {
    auto rows = influence(e, Formula::kProse, "ellie");
    ASSERT_EQ(rows.size(), 2u) << engine_name(e);
    EXPECT_EQ(rows[0], (InfluenceRow{"u2", 4, 0, 0, 0, 0, 4}));
    EXPECT_EQ(rows[1], (InfluenceRow{"u1", 1, 0, 0, 0, 0, 1}));
  }
}

TEST_F(TasksTest, InfluenceEnginesAgreeOnRandomData) {
  std::mt19937_64 rng(21);
  std::string raw;
  for (int i = 0; i < 3000; ++i) {
    raw += tweet("t" + std::to_string(i), "u" + std::to_string(rng() % 97),
                 static_cast<int>(rng() % 500), static_cast<int>(rng() % 40),
                 static_cast<int>(rng() % 5), static_cast<int>(rng() % 9),
                 static_cast<int>(rng() % 12));
  }
  load(raw);
  for (auto f : {Formula::kProse, Formula::kVerbatim}) {
    auto base = influence_csv(influence(InfluenceEngine::kSqlExternal, f));
    EXPECT_EQ(influence_csv(influence(InfluenceEngine::kSqlInternal, f)), base);
    EXPECT_EQ(influence_csv(influence(InfluenceEngine::kCfScan, f)), base);
  }
  // verbatim - prose == likes - quotes for every author.
  auto prose = influence(InfluenceEngine::kSqlExternal, Formula::kProse);
  std::map<std::string, InfluenceRow> by;
  for (const auto& r : influence(InfluenceEngine::kSqlExternal, Formula::kVerbatim)) {
    by[r.author_id] = r;
  }
  for (const auto& p : prose) {
    const auto& v = by.at(p.author_id);
    EXPECT_EQ(v.influence - p.influence, p.likes - p.quotes);
  }
  for (std::size_t i = 1; i < prose.size(); ++i) {
    EXPECT_GE(prose[i - 1].influence, prose[i].influence);
  }
}

TEST(Influence, SqlTextVariants) {
  auto v = influence_sql(Formula::kVerbatim, "tweets");
  auto p = influence_sql(Formula::kProse, "tweets_internal");
  EXPECT_NE(v.find("SELECT author_id,\n"), std::string::npos);
  EXPECT_NE(v.find("FROM tweets GROUP BY author_id ORDER BY influence DESC"), std::string::npos);
  EXPECT_NE(p.find("FROM tweets_internal GROUP BY"), std::string::npos);
  EXPECT_EQ(influence_of({"a", 1, 2, 3, 4, 5, 0}, Formula::kProse), 15);
  EXPECT_EQ(influence_of({"a", 1, 2, 3, 4, 5, 0}, Formula::kVerbatim), 14);
}

TEST_F(TasksTest, TermsHandTrace) {
  auto m = load(R"({"id":"1","author_id":"a","text":"The cat, the hat."})"
                "\n"
                R"({"id":"2","author_id":"a","text":"cat"})"
                "\n");
  for (auto e : {TermsEngine::kMapReduce, TermsEngine::kDataflow}) {
    TermsOptions o;
    o.engine = e;
    o.stopwords = {"the"};
    auto rows = task_terms(dfs_, m.tweets_path, o);
    EXPECT_EQ(rows, (std::vector<TermRow>{{"cat", 2}, {"hat", 1}})) << engine_name(e);
  }
}

TEST_F(TasksTest, TermsAllStopwords) {
  auto m = load(R"({"id":"1","author_id":"a","text":"the THE the"})"
                "\n");
  TermsOptions o;
  o.stopwords = {"the"};
  EXPECT_TRUE(task_terms(dfs_, m.tweets_path, o).empty());
}

TEST_F(TasksTest, TermsEnginesAgree) {
  const char* words[] = {"last", "of", "us", "joel", "ellie", "episode", "great", "-", "Clicker,",
                         "fungus.", "HBO", "state-of-the-art", "wow!"};
  std::mt19937_64 rng(4);
  std::string raw;
  for (int i = 0; i < 10000; ++i) {
    std::string text;
    int n = 1 + static_cast<int>(rng() % 12);
    for (int w = 0; w < n; ++w) text += std::string(w ? " " : "") + words[rng() % 13];
    raw += tweet("t" + std::to_string(i), "u" + std::to_string(i % 50), 1, 1, 1, 1, 1, text);
  }
  auto m = load(raw);
  TermsOptions mr;
  mr.engine = TermsEngine::kMapReduce;
  mr.stopwords = {"of"};
  mr.workers = 4;
  TermsOptions flow = mr;
  flow.engine = TermsEngine::kDataflow;
  flow.splits = 8;
  auto a = terms_csv(task_terms(dfs_, m.tweets_path, mr));
  auto b = terms_csv(task_terms(dfs_, m.tweets_path, flow));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, 11), "term,count\n");
}

TEST_F(TasksTest, GraphTask) {
  load(tweet("t1", "u1", 0, 0, 0, 0, 0) + tweet("t2", "u2", 0, 0, 0, 0, 0) +
       tweet("t3", "u3", 0, 0, 0, 0, 0) + tweet("t4", "u4", 0, 0, 0, 0, 0));
  auto r = task_graph(catalog_, "src,dst\nu1,u2\nu3,u4\n");
  EXPECT_EQ(r.component_count, 2u);
  EXPECT_EQ(r.vertex_count, 4u);
  EXPECT_EQ(r.edge_list, "src,dst\nu1,u2\nu3,u4\n");
  EXPECT_EQ(degrees_csv(r.degrees),
            "id,username,in_degree,out_degree\n"
            "u1,user_u1,0,1\nu2,user_u2,1,0\nu3,user_u3,0,1\nu4,user_u4,1,0\n");
  EXPECT_EQ(components_csv(r.components), "id,component\nu1,u1\nu2,u1\nu3,u3\nu4,u3\n");

  auto empty = task_graph(catalog_, "src,dst\n");
  EXPECT_EQ(empty.component_count, 4u);
}

TEST_F(TasksTest, TopInDegreeMatchesCount) {
  std::string raw;
  for (int i = 0; i < 40; ++i) raw += tweet("t" + std::to_string(i), "u" + std::to_string(i), 0, 0, 0, 0, 0);
  load(raw);
  std::mt19937_64 rng(8);
  std::string follows = "src,dst\n";
  std::map<std::string, std::set<std::string>> followers;
  for (int i = 0; i < 300; ++i) {
    std::string s = "u" + std::to_string(rng() % 40), d = "u" + std::to_string(rng() % 40);
    follows += s + "," + d + "\n";
    if (s != d) followers[d].insert(s);
  }
  auto r = task_graph(catalog_, follows);
  std::size_t best = 0;
  for (const auto& [u, f] : followers) best = std::max(best, f.size());
  std::int64_t top = 0;
  for (const auto& d : r.degrees) top = std::max(top, d.in_degree);
  EXPECT_EQ(top, static_cast<std::int64_t>(best));
}

TEST_F(TasksTest, WriteReport) {
  auto path = write_report(dfs_, "run1", "a.csv", "x\n");
  EXPECT_EQ(path, "/reports/run1/a.csv");
  write_report(dfs_, "run1", "a.csv", "y\n");
  EXPECT_EQ(dfs_.get_file(path), "y\n");
}

}  // namespace
