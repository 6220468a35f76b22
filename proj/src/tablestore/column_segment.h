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

// Columnar encoding for internal tables. One segment holds one leaf column:
//
//   "MPXCOL1\n" | type 'I' or 'T' | u64 row count |
//   I: null bitmap (ceil(n/8) bytes) then n x int64
//   T: u64 dictionary size, per entry u32 length + bytes, then n x int32 codes
//      (-1 = NULL)
//
// Integers are little-endian.

#ifndef MINIPLEX_TABLESTORE_COLUMN_SEGMENT_H_
#define MINIPLEX_TABLESTORE_COLUMN_SEGMENT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "miniplex/tablestore/schema.h"
#include "miniplex/tablestore/value.h"

namespace miniplex::tablestore {

class ColumnSegment {
 public:
  static ColumnSegment build(ColumnType type, const std::vector<Value>& values);
  static ColumnSegment decode(std::string_view bytes);

  std::string encode() const;
  std::size_t size() const;
  Value at(std::size_t row) const;
  ColumnType type() const { return type_; }

 private:
  ColumnType type_ = ColumnType::kInt64;
  std::size_t rows_ = 0;
  std::vector<std::int64_t> ints_;
  std::vector<bool> present_;
  std::vector<std::string> dict_;
  std::vector<std::int32_t> codes_;
};

}  // namespace miniplex::tablestore

#endif  // MINIPLEX_TABLESTORE_COLUMN_SEGMENT_H_
