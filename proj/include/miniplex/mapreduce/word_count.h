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

#ifndef MINIPLEX_MAPREDUCE_WORD_COUNT_H_
#define MINIPLEX_MAPREDUCE_WORD_COUNT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "miniplex/dataflow/tokenize.h"
#include "miniplex/mapreduce/job.h"

namespace miniplex::mapreduce {

// Emits (token, 1) for every non-stopword token of the normalized line.
std::vector<KVPair> word_count_mapper(std::string_view line,
                                      const dataflow::StopWords& stopwords,
                                      bool extended_normalization = false);

// Emits (key, sum of integer values).
std::vector<KVPair> sum_reducer(const Datum& key, const std::vector<Datum>& values);

// Collapses a word-count job result into (count, term) rows ordered by count
// descending, then term ascending.
std::vector<std::pair<std::int64_t, std::string>> rank_counts(const JobResult& result);

}  // namespace miniplex::mapreduce

#endif  // MINIPLEX_MAPREDUCE_WORD_COUNT_H_
