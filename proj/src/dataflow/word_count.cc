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

#include "miniplex/dataflow/word_count.h"

#include <functional>
#include <memory>

namespace miniplex::dataflow {

Dataset<CountTerm> word_count(const Dataset<std::string>& lines, StopWords stopwords,
                              bool extended_normalization) {
  auto stop = std::make_shared<const StopWords>(std::move(stopwords));
  return lines
      .map([extended_normalization](const std::string& x) {
        return extended_normalization ? normalize_extended(x) : normalize(x);
      })
      .flat_map([](const std::string& x) { return split_whitespace(x); })
      .filter([stop](const std::string& x) { return !stop->contains(x); })
      .map([](const std::string& x) { return std::pair<std::string, std::int64_t>(x, 1); })
      .reduce_by_key(std::plus<std::int64_t>())
      .map([](const std::pair<std::string, std::int64_t>& x) {
        return CountTerm(x.second, x.first);
      })
      .sort_by_key(/*ascending=*/false);
}

}  // namespace miniplex::dataflow
