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

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "miniplex/common/error.h"
#include "miniplex/dataflow/dataset.h"
#include "miniplex/dataflow/tokenize.h"
#include "miniplex/dataflow/word_count.h"
#include "miniplex/dfs/mini_dfs.h"
#include "test_util.h"

namespace {

using miniplex::Error;
using miniplex::ErrorCode;
using miniplex::dataflow::Context;
using miniplex::dataflow::CountTerm;
using miniplex::dataflow::tokenize;
using miniplex::testing::TempDir;
using Strings = std::vector<std::string>;
using Pair = std::pair<std::string, std::int64_t>;

TEST(TokenizeTest, HandTracedFixtures) {
  EXPECT_EQ(tokenize("The cat, the hat."), (Strings{"the", "cat", "the", "hat"}));
  EXPECT_EQ(tokenize("state-of-the-art rocks"), (Strings{"stateoftheart", "rocks"}));
  EXPECT_EQ(tokenize(""), Strings{});
  EXPECT_EQ(tokenize("cat!"), Strings{"cat!"});
  EXPECT_EQ(tokenize("a,b.c"), (Strings{"a", "b", "c"}));
  EXPECT_EQ(tokenize("  TAB\there\r\n"), (Strings{"tab", "here"}));
  EXPECT_EQ(tokenize("- -- -"), Strings{});
}

TEST(TokenizeTest, ExtendedNormalizationStripsPunctuation) {
  EXPECT_EQ(tokenize("cat! #wow (yes)? state-of-art", true),
            (Strings{"cat", "wow", "yes", "stateofart"}));
  EXPECT_EQ(tokenize("caf\xc3\xa9!", true), Strings{"caf\xc3\xa9"});
}

TEST(TokenizeTest, StopwordFileParsing) {
  auto words = miniplex::dataflow::parse_stopwords(" the \n\nA\r\nof");
  EXPECT_EQ(words.size(), 3u);
  EXPECT_TRUE(words.contains("the"));
  EXPECT_TRUE(words.contains("A"));
  EXPECT_TRUE(miniplex::dataflow::parse_stopwords("").empty());
  EXPECT_THROW(miniplex::dataflow::read_stopwords_file("/nonexistent/stop.txt"), Error);
}

TEST(DatasetTest, SourcesAndNarrowTransforms) {
  Context ctx;
  EXPECT_TRUE(ctx.from_rows(std::vector<int>{}).collect().empty());
  EXPECT_EQ(ctx.from_rows(std::vector<int>{1, 2, 3}).map([](int x) { return x + 1; }).collect(),
            (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(ctx.from_rows(Strings{"a b", "c"})
                .flat_map([](const std::string& s) { return miniplex::dataflow::split_whitespace(s); })
                .collect(),
            (Strings{"a", "b", "c"}));
  EXPECT_EQ(ctx.from_rows(Strings{"the", "cat"})
                .filter([](const std::string& s) { return s != "the"; })
                .collect(),
            Strings{"cat"});
}

TEST(DatasetTest, TextFileSourceIsLazyAndOrdered) {
  TempDir dir;
  miniplex::dfs::MiniDfs dfs(dir.path());
  dfs.put_file("/lines.txt", "one\ntwo\nthree\n");
  Context ctx;
  auto ds = ctx.from_text_file(dfs, "/lines.txt", 2)
                .map([](const std::string& s) { return s + "!"; })
                .filter([](const std::string&) { return true; });
  EXPECT_EQ(ctx.bytes_read(), 0u);
  EXPECT_EQ(ctx.source_reads(), 0u);
  EXPECT_EQ(ds.collect(), (Strings{"one!", "two!", "three!"}));
  EXPECT_EQ(ctx.bytes_read(), 14u);
  EXPECT_EQ(ds.count(), 3);
  EXPECT_EQ(ds.plan(), "text_file(/lines.txt) -> map -> filter");
}

TEST(DatasetTest, UnknownPathFailsAtActionTime) {
  TempDir dir;
  miniplex::dfs::MiniDfs dfs(dir.path());
  Context ctx;
  auto ds = ctx.from_text_file(dfs, "/missing", 1);
  try {
    ds.collect();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

TEST(DatasetTest, MorePartitionsThanRows) {
  TempDir dir;
  miniplex::dfs::MiniDfs dfs(dir.path());
  dfs.put_file("/two", "x\ny\n");
  Context ctx;
  auto parts = ctx.from_text_file(dfs, "/two", 4).collect_partitions();
  ASSERT_EQ(parts.size(), 4u);
  int non_empty = 0;
  for (const auto& p : parts) non_empty += !p.empty();
  EXPECT_EQ(non_empty, 2);
  EXPECT_EQ(ctx.from_text_file(dfs, "/two", 4).collect(), (Strings{"x", "y"}));
}

TEST(DatasetTest, FunctionFailureNamesPartition) {
  Context ctx;
  auto ds = ctx.from_rows(std::vector<int>{1, 2, 3, 4}, 4).map([](int x) {
    if (x == 3) throw std::runtime_error("boom");
    return x;
  });
  try {
    ds.collect();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTaskFailed);
    EXPECT_NE(std::string(e.what()).find("partition 2"), std::string::npos);
  }
}

TEST(DatasetTest, ReduceByKey) {
  Context ctx;
  auto out = ctx.from_rows(std::vector<Pair>{{"a", 1}, {"b", 1}, {"a", 1}})
                 .reduce_by_key([](std::int64_t x, std::int64_t y) { return x + y; })
                 .collect();
  EXPECT_EQ(out, (std::vector<Pair>{{"a", 2}, {"b", 1}}));
  EXPECT_TRUE(ctx.from_rows(std::vector<Pair>{})
                  .reduce_by_key(std::plus<std::int64_t>())
                  .collect()
                  .empty());
}

TEST(DatasetTest, SortByKeyWithValueTieBreak) {
  Context ctx;
  using P = std::pair<int, std::string>;
  EXPECT_EQ(ctx.from_rows(std::vector<P>{{1, "cat"}, {3, "dog"}, {2, "ant"}})
                .sort_by_key(false)
                .collect(),
            (std::vector<P>{{3, "dog"}, {2, "ant"}, {1, "cat"}}));
  EXPECT_EQ(ctx.from_rows(std::vector<P>{{1, "hat"}, {1, "cat"}}).sort_by_key(false).collect(),
            (std::vector<P>{{1, "cat"}, {1, "hat"}}));
  EXPECT_EQ(ctx.from_rows(std::vector<P>{{1, "hat"}, {1, "cat"}, {0, "z"}}).sort_by_key(true).collect(),
            (std::vector<P>{{0, "z"}, {1, "cat"}, {1, "hat"}}));
  EXPECT_TRUE(ctx.from_rows(std::vector<P>{}).sort_by_key(false).collect().empty());
}

TEST(DatasetTest, CollectIsRepeatable) {
  Context ctx;
  auto ds = ctx.from_rows(Strings{"a b a"})
                .flat_map([](const std::string& s) { return tokenize(s); })
                .map([](const std::string& w) { return Pair(w, 1); })
                .reduce_by_key(std::plus<std::int64_t>());
  EXPECT_EQ(ds.count(), 2);
  EXPECT_EQ(ds.collect(), ds.collect());
  EXPECT_EQ(ctx.source_reads(), 3u);
}

TEST(WordCountPipelineTest, PunctuationSurvivesAndTiesBreakByTerm) {
  Context ctx;
  auto out = miniplex::dataflow::word_count(
                 ctx.from_rows(Strings{"The cat, the hat.", "cat!"}), {"the"})
                 .collect();
  EXPECT_EQ(out, (std::vector<CountTerm>{{1, "cat"}, {1, "cat!"}, {1, "hat"}}));
}

TEST(WordCountPipelineTest, StopwordsMatchAfterLowercasing) {
  Context ctx;
  auto out = miniplex::dataflow::word_count(ctx.from_rows(Strings{"The THE the cat"}),
                                            {"the"})
                 .collect();
  EXPECT_EQ(out, (std::vector<CountTerm>{{1, "cat"}}));
}

// Sequential per-key left fold, the oracle for reduce_by_key.
template <class F>
std::map<std::string, std::int64_t> fold_oracle(const std::vector<Pair>& rows, F f) {
  std::map<std::string, std::int64_t> acc;
  for (const auto& [k, v] : rows) {
    auto it = acc.find(k);
    if (it == acc.end()) {
      acc.emplace(k, v);
    } else {
      it->second = f(it->second, v);
    }
  }
  return acc;
}

TEST(DatasetProperty, ReduceByKeyMatchesSequentialFold) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Pair> rows;
    const int n = trial == 0 ? 10000 : static_cast<int>(rng() % 2000);
    for (int i = 0; i < n; ++i) {
      rows.emplace_back("k" + std::to_string(rng() % 97),
                        static_cast<std::int64_t>(rng() % 1000) - 500);
    }
    auto add = [](std::int64_t a, std::int64_t b) { return a + b; };
    auto max = [](std::int64_t a, std::int64_t b) { return std::max(a, b); };
    for (int parts : {1, 3, 8}) {
      for (int workers : {1, 4}) {
        Context ctx(workers);
        auto sums = ctx.from_rows(rows, parts).reduce_by_key(add).collect();
        auto expect_sum = fold_oracle(rows, add);
        EXPECT_EQ(sums, (std::vector<Pair>(expect_sum.begin(), expect_sum.end())));
        auto maxes = ctx.from_rows(rows, parts).reduce_by_key(max).collect();
        auto expect_max = fold_oracle(rows, max);
        EXPECT_EQ(maxes, (std::vector<Pair>(expect_max.begin(), expect_max.end())));
      }
    }
  }
}

TEST(DatasetProperty, PartitionCountIsInvisible) {
  std::mt19937_64 rng(11);
  Strings lines;
  for (int i = 0; i < 500; ++i) {
    std::string line;
    for (int w = 0; w < 6; ++w) line += "w" + std::to_string(rng() % 40) + (w % 2 ? ", " : " ");
    lines.push_back(line);
  }
  Context base;
  auto expected = miniplex::dataflow::word_count(base.from_rows(lines, 1), {"w1"}).collect();
  for (int parts : {2, 5, 16, 1000}) {
    Context ctx(3);
    EXPECT_EQ(miniplex::dataflow::word_count(ctx.from_rows(lines, parts), {"w1"}).collect(),
              expected);
  }
  for (std::size_t i = 1; i < expected.size(); ++i) {
    EXPECT_GE(expected[i - 1].first, expected[i].first);
    if (expected[i - 1].first == expected[i].first) {
      EXPECT_LT(expected[i - 1].second, expected[i].second);
    }
  }
}

}  // namespace
