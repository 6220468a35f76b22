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

#ifndef MINIPLEX_COMMON_HASH_H_
#define MINIPLEX_COMMON_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace miniplex {

// 64-bit FNV-1a. Stable across runs and platforms; used for partitioning,
// block checksums and report fingerprints.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

// Lower-case 16-digit hex rendering.
std::string hex64(std::uint64_t value);

}  // namespace miniplex

#endif  // MINIPLEX_COMMON_HASH_H_
