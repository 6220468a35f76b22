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

#ifndef MINIPLEX_DATAFLOW_TOKENIZE_H_
#define MINIPLEX_DATAFLOW_TOKENIZE_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace miniplex::dataflow {

using StopWords = std::unordered_set<std::string>;

// Term normalization used by both word-count engines, applied in this order:
//   ',' -> ' '    '.' -> ' '    '-' deleted    ASCII lower-case
// Every other byte is kept, so "cat!" and "cat" stay distinct terms.
std::string normalize(std::string_view line);

// Extended mode runs normalize() and then turns every remaining ASCII
// non-alphanumeric byte into a space. Bytes >= 0x80 are kept.
std::string normalize_extended(std::string_view line);

// Splits on runs of whitespace (space, \t \n \v \f \r and \x1c-\x1f).
std::vector<std::string> split_whitespace(std::string_view text);

inline std::vector<std::string> tokenize(std::string_view line,
                                         bool extended = false) {
  return split_whitespace(extended ? normalize_extended(line) : normalize(line));
}

// One stopword per line, surrounding whitespace trimmed, blank lines skipped.
// Entries are matched verbatim against already lower-cased tokens.
StopWords parse_stopwords(std::string_view text);
StopWords read_stopwords_file(const std::filesystem::path& path);

}  // namespace miniplex::dataflow

#endif  // MINIPLEX_DATAFLOW_TOKENIZE_H_
