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

#ifndef MINIPLEX_DATAFLOW_WORD_COUNT_H_
#define MINIPLEX_DATAFLOW_WORD_COUNT_H_

#include <cstdint>
#include <string>
#include <utility>

#include "miniplex/dataflow/dataset.h"
#include "miniplex/dataflow/tokenize.h"

namespace miniplex::dataflow {

// (count, term), the shape the term-frequency pipeline sorts on.
using CountTerm = std::pair<std::int64_t, std::string>;

// normalize -> split -> drop stopwords -> (term, 1) -> reduce_by_key(+)
//   -> swap to (count, term) -> sort_by_key(descending)
// Equal counts come out in ascending term order.
Dataset<CountTerm> word_count(const Dataset<std::string>& lines, StopWords stopwords,
                              bool extended_normalization = false);

}  // namespace miniplex::dataflow

#endif  // MINIPLEX_DATAFLOW_WORD_COUNT_H_
