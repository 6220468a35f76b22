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

#ifndef MINIPLEX_COMMON_STRINGS_H_
#define MINIPLEX_COMMON_STRINGS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace miniplex {

// Splits on '\n'; a trailing newline does not produce an empty last line and
// a '\r' before the newline is dropped.
std::vector<std::string> split_lines(std::string_view text);

std::vector<std::string> split(std::string_view text, char delim);

std::string_view trim(std::string_view text);

std::string to_lower_ascii(std::string_view text);

bool iequals(std::string_view a, std::string_view b);

std::optional<std::int64_t> parse_int64(std::string_view text);

// Backslash escaping of '\\', '\t', '\n' and '\r' so a value fits in one
// field of a tab-separated line.
std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

// Local file helpers.
std::string read_local_file(const std::filesystem::path& path);
void write_local_file(const std::filesystem::path& path, std::string_view data);

}  // namespace miniplex

#endif  // MINIPLEX_COMMON_STRINGS_H_
