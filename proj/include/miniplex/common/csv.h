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

#ifndef MINIPLEX_COMMON_CSV_H_
#define MINIPLEX_COMMON_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace miniplex::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
// newlines. Throws Error(kCorruption) on an unterminated quote.
std::vector<Row> parse(std::string_view text);

// Quotes a field only when it contains a comma, quote, or line break.
std::string quote(std::string_view field);

std::string format_row(const Row& row);

}  // namespace miniplex::csv

#endif  // MINIPLEX_COMMON_CSV_H_
