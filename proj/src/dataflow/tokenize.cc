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

#include "miniplex/dataflow/tokenize.h"

#include "miniplex/common/error.h"
#include "miniplex/common/strings.h"

namespace miniplex::dataflow {
namespace {

bool is_split_space(unsigned char c) {
  return c == ' ' || (c >= '\t' && c <= '\r') || (c >= 0x1c && c <= 0x1f);
}

bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace

std::string normalize(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  for (char c : line) {
    switch (c) {
      case ',':
      case '.':
        out += ' ';
        break;
      case '-':
        break;
      default:
        out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    }
  }
  return out;
}

std::string normalize_extended(std::string_view line) {
  std::string out = normalize(line);
  for (char& c : out) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && !is_ascii_alnum(u)) c = ' ';
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_split_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_split_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

StopWords parse_stopwords(std::string_view text) {
  StopWords words;
  for (const auto& line : split_lines(text)) {
    std::string_view w = trim(line);
    if (!w.empty()) words.emplace(w);
  }
  return words;
}

StopWords read_stopwords_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kNotFound, "stopword file not found: " + path.string());
  }
  return parse_stopwords(read_local_file(path));
}

}  // namespace miniplex::dataflow
