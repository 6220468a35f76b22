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

#include "miniplex/mapreduce/word_count.h"

#include <algorithm>

#include "miniplex/common/error.h"

namespace miniplex::mapreduce {

std::vector<KVPair> word_count_mapper(std::string_view line,
                                      const dataflow::StopWords& stopwords,
                                      bool extended_normalization) {
  std::vector<KVPair> out;
  for (auto& token : dataflow::tokenize(line, extended_normalization)) {
    if (stopwords.contains(token)) continue;
    out.push_back({std::move(token), std::int64_t{1}});
  }
  return out;
}

std::vector<KVPair> sum_reducer(const Datum& key, const std::vector<Datum>& values) {
  std::int64_t total = 0;
  for (const auto& v : values) {
    const auto* i = std::get_if<std::int64_t>(&v);
    if (!i) throw Error(ErrorCode::kInvalidArgument, "sum_reducer: non-integer value");
    total += *i;
  }
  return {{key, total}};
}

std::vector<std::pair<std::int64_t, std::string>> rank_counts(const JobResult& result) {
  std::vector<std::pair<std::int64_t, std::string>> rows;
  rows.reserve(result.output.size());
  for (const auto& kv : result.output) {
    rows.emplace_back(std::get<std::int64_t>(kv.value), to_string(kv.key));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  return rows;
}

}  // namespace miniplex::mapreduce
