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

// Seeded synthetic tweets, users and follows.
//
// Output is a pure function of GenSpec. The random stream is mt19937_64,
// whose sequence the standard fixes, and every distribution on top of it is
// computed here, so the bytes do not depend on the standard library.

#ifndef MINIPLEX_BENCH_GENERATOR_H_
#define MINIPLEX_BENCH_GENERATOR_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace miniplex::bench {

struct GenSpec {
  std::int64_t n_tweets = 1000;
  std::int64_t n_users = 100;
  std::uint64_t seed = 1;
  std::int64_t vocab_size = 2000;
  double zipf_s = 1.1;
  double follow_density = 0.01;
  // When set, about topic_rate of the tweets mention it.
  std::optional<std::string> topic;
  double topic_rate = 0.5;
};

// Throws kInvalidArgument.
void validate(const GenSpec& spec);

struct GeneratedData {
  std::string tweets_jsonl;
  std::string users_jsonl;
  std::string follows_csv;  // header "src,dst"
  std::int64_t follows = 0;
};

GeneratedData generate_data(const GenSpec& spec);

// Token `rank` of the vocabulary; rank 0 is the most frequent.
std::string vocab_word(std::int64_t rank);

struct GenFile {
  std::string name;
  std::uint64_t bytes = 0;
  std::string checksum;  // fnv1a64, hex
};

struct GenManifest {
  GenSpec spec;
  std::int64_t tweets = 0;
  std::int64_t users = 0;
  std::int64_t follows = 0;
  std::vector<GenFile> files;
};

std::string manifest_json(const GenManifest& m);

// Writes tweets.jsonl, users.jsonl, follows.csv and manifest.json into
// `out_dir`, creating it. Throws kIo when it cannot.
GenManifest generate(const GenSpec& spec, const std::filesystem::path& out_dir);

}  // namespace miniplex::bench

#endif  // MINIPLEX_BENCH_GENERATOR_H_
