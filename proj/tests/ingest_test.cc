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

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "miniplex/cfstore/cf_store.h"
#include "miniplex/common/error.h"
#include "miniplex/common/hash.h"
#include "miniplex/common/strings.h"
#include "miniplex/dfs/mini_dfs.h"
#include "miniplex/ingest/ingest.h"
#include "miniplex/tablestore/catalog.h"
#include "test_util.h"

namespace {

using miniplex::Error;
using miniplex::ErrorCode;
using namespace miniplex::ingest;
using miniplex::cfstore::CfStore;
using miniplex::dfs::MiniDfs;
using miniplex::tablestore::Catalog;
using miniplex::testing::TempDir;

Clock fixed_clock() {
  return [] { return std::string("2026-01-01T00:00:00Z"); };
}

std::string tweet(const std::string& id, const std::string& author, int likes = 1) {
  return R"({"id":")" + id + R"(","author_id":")" + author +
         R"(","text":"hello world","created_at":"2023-01-15T00:00:00Z","public_metrics":{"impression_count":10,"like_count":)" +
         std::to_string(likes) + R"(,"quote_count":0,"reply_count":0,"retweet_count":1}})";
}

// Hand-labelled: 5 good, 5 malformed, 2 duplicates, 1 blank line.
const std::vector<std::pair<std::string, char>> kLabelled = {
    {tweet("t1", "u1"), 'g'},
    {tweet("t2", "u2"), 'g'},
    {"{not json", 'm'},
    {tweet("t1", "u9"), 'd'},
    {R"({"id":"t3","text":"no author"})", 'm'},
    {R"([1,2,3])", 'm'},
    {R"({"id":"t4","author_id":"u1","public_metrics":{"like_count":-1}})", 'm'},
    {R"({"id":"","author_id":"u1"})", 'm'},
    {R"({"id":5,"author_id":7,"username":"seven"})", 'g'},
    {"   ", 'b'},
    {tweet("t2", "u2"), 'd'},
    {R"({"id":"t6","author_id":"u3","text":"","public_metrics":{"impression_count":"12"}})", 'g'},
    {R"({"id":"t7","author_id":"u3","author":{"username":"third"}})", 'g'},
};

std::string labelled_raw() {
  std::string raw;
  for (const auto& [line, label] : kLabelled) raw += line + "\n";
  return raw;
}

TEST(Preprocess, ConservationOnLabelledFixture) {
  auto out = preprocess_records(labelled_raw(), "b000001", "now");
  std::int64_t good = 0, bad = 0, dup = 0, read = 0;
  for (const auto& [line, label] : kLabelled) {
    if (label == 'b') continue;
    ++read;
    good += label == 'g';
    bad += label == 'm';
    dup += label == 'd';
  }
  EXPECT_EQ(out.stats.read, read);
  EXPECT_EQ(out.stats.malformed, bad);
  EXPECT_EQ(out.stats.duplicates, dup);
  EXPECT_EQ(out.stats.emitted_tweets, good);
  EXPECT_EQ(out.stats.read,
            out.stats.malformed + out.stats.duplicates + out.stats.emitted_tweets);
  EXPECT_EQ(out.stats.emitted_users, 4);  // u1, u2, 7, u3
}

TEST(Preprocess, Normalization) {
  auto out = preprocess_records(labelled_raw(), "b000001", "now");
  auto lines = miniplex::split_lines(out.tweets_jsonl);
  ASSERT_EQ(lines.size(), 5u);
  auto first = nlohmann::json::parse(lines[0]);
  EXPECT_EQ(first["id"], "t1");
  EXPECT_EQ(first["author_id"], "u1");  // keep-first
  EXPECT_EQ(first["batch_id"], "b000001");
  EXPECT_EQ(first["ingested_at"], "now");
  auto numeric = nlohmann::json::parse(lines[2]);
  EXPECT_EQ(numeric["id"], "5");
  EXPECT_EQ(numeric["public_metrics"]["like_count"], 0);  // absent -> 0
  auto coerced = nlohmann::json::parse(lines[3]);
  EXPECT_EQ(coerced["public_metrics"]["impression_count"], 12);
  EXPECT_EQ(coerced["text"], "");

  EXPECT_EQ(out.users_jsonl,
            "{\"id\":\"7\",\"username\":\"seven\"}\n"
            "{\"id\":\"u1\",\"username\":\"user_u1\"}\n"
            "{\"id\":\"u2\",\"username\":\"user_u2\"}\n"
            "{\"id\":\"u3\",\"username\":\"third\"}\n");
}

TEST(Preprocess, MissingLikeCountBecomesZero) {
  auto out = preprocess_records(
      R"({"id":"t","author_id":"a","public_metrics":{"impression_count":3}})", "b", "x");
  auto rec = nlohmann::json::parse(out.tweets_jsonl);
  EXPECT_EQ(rec["public_metrics"]["like_count"], 0);
  EXPECT_EQ(rec["public_metrics"]["impression_count"], 3);
}

TEST(Preprocess, Idempotent) {
  auto once = preprocess_records(labelled_raw(), "b000001", "t0");
  auto twice = preprocess_records(once.tweets_jsonl, "b000002", "t1");
  EXPECT_EQ(twice.stats.malformed, 0);
  EXPECT_EQ(twice.stats.duplicates, 0);
  EXPECT_EQ(twice.stats.emitted_tweets, once.stats.emitted_tweets);
  EXPECT_EQ(twice.tweets_jsonl, once.tweets_jsonl);
  EXPECT_EQ(twice.users_jsonl, once.users_jsonl);
}

TEST(Preprocess, RandomConservation) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::string raw;
    const int n = static_cast<int>(rng() % 200);
    for (int i = 0; i < n; ++i) {
      switch (rng() % 4) {
        case 0: raw += "garbage\n"; break;
        case 1: raw += "\n"; break;
        default:
          raw += tweet("t" + std::to_string(rng() % 50), "u" + std::to_string(rng() % 7)) + "\n";
      }
    }
    auto out = preprocess_records(raw, "b", "t");
    EXPECT_EQ(out.stats.read,
              out.stats.malformed + out.stats.duplicates + out.stats.emitted_tweets);
    auto again = preprocess_records(out.tweets_jsonl, "c", "u");
    EXPECT_EQ(again.tweets_jsonl, out.tweets_jsonl);
    EXPECT_EQ(again.stats.malformed + again.stats.duplicates, 0);
  }
}

class IngestTest : public ::testing::Test {
 protected:
  IngestTest() : dfs_(dir_ / "dfs", {3, 4096, 2}), ingestor_(dfs_, fixed_clock()) {}

  TempDir dir_;
  MiniDfs dfs_;
  Ingestor ingestor_;
};

TEST_F(IngestTest, LandCopiesBytes) {
  std::string raw;
  for (int i = 0; i < 10; ++i) raw += tweet("t" + std::to_string(i), "u1") + "\n";
  miniplex::write_local_file(dir_ / "in.jsonl", raw);
  auto m = ingestor_.land(dir_ / "in.jsonl");
  EXPECT_EQ(m.batch_id, "b000001");
  EXPECT_EQ(m.raw_path, "/landing/b000001/raw.jsonl");
  EXPECT_EQ(dfs_.get_file(m.raw_path), raw);
  auto p = ingestor_.preprocess(m.batch_id);
  EXPECT_EQ(p.stats.read, 10);
  EXPECT_EQ(dfs_.get_file(m.raw_path), raw);
  EXPECT_EQ(ingestor_.manifest(m.batch_id).stats, p.stats);
}

TEST_F(IngestTest, LandTwiceKeepsBoth) {
  auto a = ingestor_.land_bytes("x\n");
  auto b = ingestor_.land_bytes("y\n");
  EXPECT_NE(a.batch_id, b.batch_id);
  EXPECT_EQ(ingestor_.batches(), (std::vector<std::string>{"b000001", "b000002"}));
  EXPECT_EQ(ingestor_.latest_batch(), "b000002");
  EXPECT_EQ(dfs_.get_file(a.raw_path), "x\n");
}

TEST_F(IngestTest, EmptyFile) {
  auto m = ingestor_.preprocess(ingestor_.land_bytes("").batch_id);
  EXPECT_EQ(m.stats, BatchStats{});
  EXPECT_EQ(dfs_.get_file(m.tweets_path), "");
}

TEST_F(IngestTest, Errors) {
  EXPECT_THROW(ingestor_.land(dir_ / "missing.jsonl"), Error);
  try {
    ingestor_.preprocess("b000042");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  auto m = ingestor_.land_bytes("a\n");
  dfs_.remove_file(m.raw_path);
  EXPECT_THROW(ingestor_.preprocess(m.batch_id), Error);
}

TEST_F(IngestTest, LandingIsImmutable) {
  const std::string raw = labelled_raw();
  auto m = ingestor_.land_bytes(raw);
  const auto before = miniplex::fnv1a64(dfs_.get_file(m.raw_path));
  ingestor_.preprocess(m.batch_id);
  ingestor_.preprocess(m.batch_id);
  EXPECT_EQ(miniplex::fnv1a64(dfs_.get_file(m.raw_path)), before);
}

TEST_F(IngestTest, LoadAllTargetsAgree) {
  std::string raw = tweet("t1", "u1") + "\n" + tweet("t2", "u1") + "\n" + tweet("t3", "u2") + "\n";
  auto m = ingestor_.preprocess(ingestor_.land_bytes(raw).batch_id);
  Catalog catalog(dfs_);
  CfStore cf(dfs_);
  auto report = load_all(dfs_, catalog, cf, m);
  ASSERT_EQ(report.tweet_counts.size(), 3u);
  for (const auto& [t, n] : report.tweet_counts) EXPECT_EQ(n, 3) << target_name(t);
  EXPECT_EQ(report.users, 2);
  EXPECT_TRUE(catalog.has_table("tweets_internal"));
  // Reloading replaces the earlier tables.
  EXPECT_NO_THROW(load_all(dfs_, catalog, cf, m));
}

TEST_F(IngestTest, LoadEmptyBatch) {
  auto m = ingestor_.preprocess(ingestor_.land_bytes("").batch_id);
  Catalog catalog(dfs_);
  CfStore cf(dfs_);
  auto report = load_all(dfs_, catalog, cf, m);
  for (const auto& [t, n] : report.tweet_counts) EXPECT_EQ(n, 0);
}

TEST_F(IngestTest, CfDuplicateIsCountMismatch) {
  std::string raw = tweet("t1", "u1") + "\n" + tweet("t2", "u2") + "\n";
  auto m = ingestor_.preprocess(ingestor_.land_bytes(raw).batch_id);
  Catalog catalog(dfs_);
  CfStore cf(dfs_);
  cf.create_table("tweets", {"m", "t"});
  cf.put("tweets", "t2", "m", "author_id", "someone");
  LoadOptions opts;
  opts.replace_existing = false;
  try {
    load_all(dfs_, catalog, cf, m, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatch);
    EXPECT_NE(std::string(e.what()).find("cfstore=1"), std::string::npos) << e.what();
  }
}

TEST_F(IngestTest, LoadRequiresPreprocessing) {
  auto m = ingestor_.land_bytes("");
  Catalog catalog(dfs_);
  CfStore cf(dfs_);
  EXPECT_THROW(load_all(dfs_, catalog, cf, m), Error);
}

}  // namespace
