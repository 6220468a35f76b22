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

#ifndef MINIPLEX_COMMON_PARALLEL_H_
#define MINIPLEX_COMMON_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <utility>
#include <thread>
#include <vector>

namespace miniplex {

inline int default_worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Runs task(i) for i in [0, n) on up to `workers` threads. If any task
// throws, the exception of the lowest failing index is rethrown after all
// tasks have finished, so failure reporting does not depend on scheduling.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& task) {
  if (n == 0) return;
  std::vector<std::exception_ptr> errors(n);
  std::size_t threads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Bounds of part `index` when `total` items are cut into `parts` contiguous,
// near-equal ranges.
inline std::pair<std::size_t, std::size_t> contiguous_range(std::size_t total,
                                                            std::size_t parts,
                                                            std::size_t index) {
  return {total * index / parts, total * (index + 1) / parts};
}

}  // namespace miniplex

#endif  // MINIPLEX_COMMON_PARALLEL_H_
