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

#ifndef MINIPLEX_TABLESTORE_VALUE_H_
#define MINIPLEX_TABLESTORE_VALUE_H_

#include <compare>
#include <cstdint>
#include <string>
#include <variant>

namespace miniplex::tablestore {

// SQL value: NULL, int64 or text. Ordering is NULL < int64 < text.
using Value = std::variant<std::monostate, std::int64_t, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Empty string for NULL.
std::string to_display(const Value& v);

}  // namespace miniplex::tablestore

#endif  // MINIPLEX_TABLESTORE_VALUE_H_
