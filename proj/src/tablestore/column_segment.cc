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

#include "column_segment.h"

#include <unordered_map>

#include "miniplex/common/error.h"

namespace miniplex::tablestore {
namespace {

constexpr std::string_view kMagic = "MPXCOL1\n";

template <class T>
void put_le(std::string& out, T v) {
  auto u = static_cast<std::make_unsigned_t<T>>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out += static_cast<char>((u >> (8 * i)) & 0xff);
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kCorruption, "segment: truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ColumnSegment ColumnSegment::build(ColumnType type, const std::vector<Value>& values) {
  ColumnSegment seg;
  seg.type_ = type;
  seg.rows_ = values.size();
  if (type == ColumnType::kInt64) {
    seg.ints_.reserve(values.size());
    seg.present_.reserve(values.size());
    for (const auto& v : values) {
      const auto* i = std::get_if<std::int64_t>(&v);
      seg.ints_.push_back(i ? *i : 0);
      seg.present_.push_back(i != nullptr);
    }
    return seg;
  }
  std::unordered_map<std::string, std::int32_t> index;
  seg.codes_.reserve(values.size());
  for (const auto& v : values) {
    const auto* s = std::get_if<std::string>(&v);
    if (!s) {
      seg.codes_.push_back(-1);
      continue;
    }
    auto [it, inserted] = index.try_emplace(*s, static_cast<std::int32_t>(seg.dict_.size()));
    if (inserted) seg.dict_.push_back(*s);
    seg.codes_.push_back(it->second);
  }
  return seg;
}

std::string ColumnSegment::encode() const {
  std::string out(kMagic);
  out += type_ == ColumnType::kInt64 ? 'I' : 'T';
  put_le<std::uint64_t>(out, rows_);
  if (type_ == ColumnType::kInt64) {
    std::string bitmap((rows_ + 7) / 8, '\0');
    for (std::size_t i = 0; i < rows_; ++i) {
      if (present_[i]) bitmap[i / 8] = static_cast<char>(bitmap[i / 8] | (1 << (i % 8)));
    }
    out += bitmap;
    for (auto v : ints_) put_le<std::int64_t>(out, v);
    return out;
  }
  put_le<std::uint64_t>(out, dict_.size());
  for (const auto& s : dict_) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out += s;
  }
  for (auto c : codes_) put_le<std::int32_t>(out, c);
  return out;
}

ColumnSegment ColumnSegment::decode(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(kMagic.size()) != kMagic) throw Error(ErrorCode::kCorruption, "segment: bad magic");
  ColumnSegment seg;
  char tag = in.take(1)[0];
  seg.rows_ = in.get<std::uint64_t>();
  if (tag == 'I') {
    seg.type_ = ColumnType::kInt64;
    auto bitmap = in.take((seg.rows_ + 7) / 8);
    seg.present_.resize(seg.rows_);
    seg.ints_.resize(seg.rows_);
    for (std::size_t i = 0; i < seg.rows_; ++i) {
      seg.present_[i] = (static_cast<unsigned char>(bitmap[i / 8]) >> (i % 8)) & 1;
      seg.ints_[i] = in.get<std::int64_t>();
    }
  } else if (tag == 'T') {
    seg.type_ = ColumnType::kText;
    auto dict_size = in.get<std::uint64_t>();
    seg.dict_.reserve(dict_size);
    for (std::uint64_t d = 0; d < dict_size; ++d) {
      auto len = in.get<std::uint32_t>();
      seg.dict_.emplace_back(in.take(len));
    }
    seg.codes_.resize(seg.rows_);
    for (std::size_t i = 0; i < seg.rows_; ++i) {
      auto code = in.get<std::int32_t>();
      if (code < -1 || code >= static_cast<std::int64_t>(dict_size)) {
        throw Error(ErrorCode::kCorruption, "segment: dictionary code out of range");
      }
      seg.codes_[i] = code;
    }
  } else {
    throw Error(ErrorCode::kCorruption, "segment: unknown column tag");
  }
  if (!in.at_end()) throw Error(ErrorCode::kCorruption, "segment: trailing bytes");
  return seg;
}

std::size_t ColumnSegment::size() const { return rows_; }

Value ColumnSegment::at(std::size_t row) const {
  if (type_ == ColumnType::kInt64) {
    if (!present_[row]) return std::monostate{};
    return ints_[row];
  }
  auto code = codes_[row];
  if (code < 0) return std::monostate{};
  return dict_[static_cast<std::size_t>(code)];
}

}  // namespace miniplex::tablestore
