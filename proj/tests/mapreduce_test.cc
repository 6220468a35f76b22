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
#include <cctype>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "miniplex/common/error.h"
#include "miniplex/dataflow/word_count.h"
#include "miniplex/dfs/mini_dfs.h"
#include "miniplex/mapreduce/job.h"
#include "miniplex/mapreduce/word_count.h"
#include "test_util.h"

namespace {

using miniplex::Error;
using miniplex::ErrorCode;
using namespace miniplex::mapreduce;
using miniplex::dataflow::StopWords;
using miniplex::testing::TempDir;
using Strings = std::vector<std::string>;

JobSpec word_count_spec(StopWords stop, int splits, int reducers,
                        SpillMode mode = SpillMode::kInMemory, int workers = 1) {
  JobSpec spec;
  spec.mapper = [stop = std::move(stop)](std::string_view line) {
    return word_count_mapper(line, stop);
  };
  spec.reducer = sum_reducer;
  spec.num_map_splits = splits;
  spec.num_reducers = reducers;
  spec.spill_mode = mode;
  spec.workers = workers;
  return spec;
}

std::map<std::string, std::int64_t> as_map(const JobResult& r) {
  std::map<std::string, std::int64_t> m;
  for (const auto& kv : r.output) m[to_string(kv.key)] = std::get<std::int64_t>(kv.value);
  return m;
}

// Independent oracle: whitespace split via istringstream after applying the
// character rules with std algorithms.
std::map<std::string, std::int64_t> brute_force_count(const Strings& lines,
                                                      const StopWords& stop) {
  std::map<std::string, std::int64_t> counts;
  for (std::string line : lines) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::replace(line.begin(), line.end(), '.', ' ');
    line.erase(std::remove(line.begin(), line.end(), '-'), line.end());
    std::transform(line.begin(), line.end(), line.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    std::istringstream in(line);
    std::string w;
    while (in >> w) {
      if (!stop.contains(w)) ++counts[w];
    }
  }
  return counts;
}

TEST(WordCountMapperTest, Examples) {
  EXPECT_EQ(word_count_mapper("The cat, the hat.", {"the"}),
            (std::vector<KVPair>{{"cat", std::int64_t{1}}, {"hat", std::int64_t{1}}}));
  EXPECT_TRUE(word_count_mapper("", {}).empty());
  EXPECT_EQ(sum_reducer(std::string("car"), {std::int64_t{1}, std::int64_t{1}, std::int64_t{1}}),
            (std::vector<KVPair>{{"car", std::int64_t{3}}}));
  EXPECT_THROW(sum_reducer(std::string("x"), {std::string("nope")}), Error);
}

TEST(RunJobTest, DeerBearRiver) {
  TempDir dir;
  miniplex::dfs::MiniDfs dfs(dir.path());
  Strings lines = {"deer bear river", "car car river", "deer car bear"};
  dfs.put_file("/in.txt", "deer bear river\ncar car river\ndeer car bear\n");
  auto spec = word_count_spec({}, 3, 2);
  spec.inputs = {"/in.txt"};
  auto result = run_job(dfs, spec);
  std::map<std::string, std::int64_t> expected{{"bear", 2}, {"car", 3}, {"deer", 2}, {"river", 2}};
  EXPECT_EQ(as_map(result), expected);
  EXPECT_EQ(brute_force_count(lines, {}), expected);
  EXPECT_EQ(result.counters.map_input_records, 3);
  EXPECT_EQ(result.counters.map_output_records, 9);
  EXPECT_EQ(result.counters.shuffle_input_records, 9);
  EXPECT_EQ(result.counters.reduce_input_records, 9);
  EXPECT_EQ(result.counters.reduce_output_records, 4);
}

TEST(RunJobTest, EmptyInput) {
  TempDir dir;
  miniplex::dfs::MiniDfs dfs(dir.path());
  dfs.put_file("/empty", "");
  auto spec = word_count_spec({}, 4, 3, SpillMode::kOnDisk);
  spec.inputs = {"/empty"};
  auto result = run_job(dfs, spec);
  EXPECT_TRUE(result.output.empty());
  EXPECT_EQ(result.counters.map_input_records, 0);
  EXPECT_EQ(result.counters.map_output_records, 0);
  EXPECT_EQ(result.counters.shuffle_input_records, 0);
  EXPECT_EQ(result.counters.reduce_input_records, 0);
  EXPECT_EQ(result.counters.reduce_output_records, 0);
}

TEST(RunJobTest, IdentityJobSortsByKey) {
  JobSpec spec;
  spec.mapper = [](std::string_view rec) {
    auto tab = rec.find(' ');
    return std::vector<KVPair>{{std::string(rec.substr(0, tab)), std::string(rec.substr(tab + 1))}};
  };
  spec.reducer = [](const Datum& k, const std::vector<Datum>& vs) {
    std::vector<KVPair> out;
    for (const auto& v : vs) out.push_back({k, v});
    return out;
  };
  spec.num_map_splits = 2;
  auto result = run_job_on_records({"b 1", "a 2", "c 3", "a 0"}, spec);
  std::vector<KVPair> expected = {{"a", "2"}, {"a", "0"}, {"b", "1"}, {"c", "3"}};
  EXPECT_EQ(result.output, expected);
}

TEST(RunJobTest, MissingInputAndBadSpec) {
  TempDir dir;
  miniplex::dfs::MiniDfs dfs(dir.path());
  auto spec = word_count_spec({}, 1, 1);
  spec.inputs = {"/nope"};
  try {
    run_job(dfs, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  spec.num_reducers = 0;
  EXPECT_THROW(run_job_on_records({}, spec), Error);
}

TEST(RunJobTest, MapperFailureReportsSplitIndex) {
  JobSpec spec = word_count_spec({}, 4, 1);
  spec.mapper = [](std::string_view rec) -> std::vector<KVPair> {
    if (rec == "bad") throw std::runtime_error("cannot map");
    return {{std::string(rec), std::int64_t{1}}};
  };
  Strings recs = {"a", "b", "c", "d", "e", "bad", "g", "h"};
  for (auto mode : {SpillMode::kInMemory, SpillMode::kOnDisk}) {
    spec.spill_mode = mode;
    try {
      run_job_on_records(recs, spec);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kTaskFailed);
      EXPECT_NE(std::string(e.what()).find("map split 2"), std::string::npos) << e.what();
    }
  }
}

TEST(RunJobTest, DiskSpillWritesRuns) {
  auto spec = word_count_spec({}, 3, 2, SpillMode::kOnDisk);
  auto result = run_job_on_records({"a b", "b c", "c d"}, spec);
  EXPECT_EQ(result.counters.spill_files, 6);
  EXPECT_GT(result.counters.spill_bytes, 0);
  EXPECT_EQ(as_map(result), (std::map<std::string, std::int64_t>{{"a", 1}, {"b", 2}, {"c", 2}, {"d", 1}}));
}

TEST(DatumTest, EncodeDecodeRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    Datum d;
    if (rng() % 2) {
      d = static_cast<std::int64_t>(rng());
    } else {
      std::string s(rng() % 12, '\0');
      for (auto& c : s) c = static_cast<char>(rng() % 256);
      d = s;
    }
    EXPECT_EQ(decode_datum(encode_datum(d)), d);
  }
  EXPECT_THROW(decode_datum("x12"), Error);
}

Strings random_lines(std::mt19937_64& rng, std::size_t n) {
  static const Strings vocab = {"The", "cat", "hat", "state-of-the-art", "a,b", "end.",
                                "RIVER", "deer", "car!", "x-y", "Bear", "--", "z"};
  Strings lines;
  for (std::size_t i = 0; i < n; ++i) {
    std::string line;
    for (std::size_t w = rng() % 9; w > 0; --w) line += vocab[rng() % vocab.size()] + " ";
    lines.push_back(line);
  }
  return lines;
}

TEST(RunJobProperty, SplitAndReducerInvariance) {
  std::mt19937_64 rng(5);
  StopWords stop = {"the", "z"};
  for (int trial = 0; trial < 5; ++trial) {
    auto lines = random_lines(rng, 300 + rng() % 300);
    std::multiset<KVPair> reference;
    bool first = true;
    for (int splits : {1, 2, 7}) {
      for (int reducers : {1, 3, 5}) {
        for (auto mode : {SpillMode::kInMemory, SpillMode::kOnDisk}) {
          auto result = run_job_on_records(lines, word_count_spec(stop, splits, reducers, mode, 3));
          std::multiset<KVPair> got(result.output.begin(), result.output.end());
          if (first) {
            reference = got;
            first = false;
          }
          EXPECT_EQ(got, reference);
          // Conservation.
          EXPECT_EQ(result.counters.map_output_records, result.counters.shuffle_input_records);
          EXPECT_EQ(result.counters.map_output_records, result.counters.reduce_input_records);
          // Sortedness and partition totality.
          std::set<Datum> seen;
          for (int r = 0; r < reducers; ++r) {
            const auto& keys = result.reducer_keys[r];
            for (std::size_t i = 0; i < keys.size(); ++i) {
              if (i) {
                EXPECT_LT(keys[i - 1], keys[i]);
              }
              EXPECT_EQ(partition_for(keys[i], reducers), static_cast<std::size_t>(r));
              EXPECT_TRUE(seen.insert(keys[i]).second);
            }
            for (auto k = result.reducer_offsets[r]; k + 1 < result.reducer_offsets[r + 1]; ++k) {
              EXPECT_LE(result.output[k].key, result.output[k + 1].key);
            }
          }
        }
      }
    }
  }
}

TEST(RunJobProperty, WorkerCountDoesNotChangeOutput) {
  std::mt19937_64 rng(8);
  auto lines = random_lines(rng, 2000);
  auto one = run_job_on_records(lines, word_count_spec({}, 8, 4, SpillMode::kInMemory, 1));
  for (int workers : {2, 4, 16}) {
    for (auto mode : {SpillMode::kInMemory, SpillMode::kOnDisk}) {
      auto many = run_job_on_records(lines, word_count_spec({}, 8, 4, mode, workers));
      EXPECT_EQ(many.output, one.output);
    }
  }
}

TEST(RunJobProperty, MatchesSequentialOracleOnLargeInput) {
  std::mt19937_64 rng(13);
  StopWords stop = {"the"};
  for (std::size_t n : {std::size_t{0}, std::size_t{17}, std::size_t{1000}, std::size_t{100000}}) {
    auto lines = random_lines(rng, n);
    auto result = run_job_on_records(lines, word_count_spec(stop, 4, 3));
    EXPECT_EQ(as_map(result), brute_force_count(lines, stop)) << n;
  }
}

TEST(CrossEngine, DataflowPipelineEqualsMapReduce) {
  std::mt19937_64 rng(21);
  StopWords stop = {"the", "cat"};
  for (int trial = 0; trial < 10; ++trial) {
    auto lines = random_lines(rng, rng() % 1000);
    auto mr = rank_counts(run_job_on_records(lines, word_count_spec(stop, 3, 2)));
    miniplex::dataflow::Context ctx(2);
    auto flow = miniplex::dataflow::word_count(ctx.from_rows(lines, 4), stop).collect();
    EXPECT_EQ(mr, flow);
  }
}

}  // namespace
