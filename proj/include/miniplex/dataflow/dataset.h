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

// Lazy, partitioned, in-memory datasets.
//
// A Dataset<T> is an immutable handle on a linear plan: a source node followed
// by zero or more transformations. Building a plan does no work; collect() and
// count() execute it from the source every time they are called. Intermediate
// results live only in memory as per-partition vectors.
//
//   Context ctx(/*workers=*/4);
//   auto counts = ctx.from_text_file(dfs, "/data/x.txt", 8)
//                     .flat_map([](const std::string& l) { return tokenize(l); })
//                     .map([](const std::string& w) { return std::pair(w, 1L); })
//                     .reduce_by_key(std::plus<>())
//                     .collect();
//
// map/flat_map/filter run partition-parallel. reduce_by_key combines within
// each partition in parallel and then merges; its output is ordered by key.
// sort_by_key is a global sort. Both re-split their output into the same
// number of contiguous partitions, so collect() output never depends on the
// partition count.

#ifndef MINIPLEX_DATAFLOW_DATASET_H_
#define MINIPLEX_DATAFLOW_DATASET_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "miniplex/common/error.h"
#include "miniplex/common/parallel.h"

namespace miniplex::dfs {
class MiniDfs;
}

namespace miniplex::dataflow {

template <class T>
using Partitions = std::vector<std::vector<T>>;

template <class T>
class Dataset;

namespace detail {

struct ContextState {
  int workers = 1;
  std::atomic<std::uint64_t> bytes_read{0};
  std::atomic<std::uint64_t> source_reads{0};
};

template <class T>
class Node {
 public:
  explicit Node(int partitions) : partitions_(partitions) {}
  virtual ~Node() = default;

  virtual Partitions<T> compute(ContextState& state) const = 0;
  virtual std::string describe() const = 0;
  int partitions() const { return partitions_; }

 private:
  int partitions_;
};

template <class T>
Partitions<T> split_contiguous(std::vector<T> rows, int parts) {
  Partitions<T> out(static_cast<std::size_t>(parts));
  for (int p = 0; p < parts; ++p) {
    auto [b, e] = contiguous_range(rows.size(), static_cast<std::size_t>(parts),
                                   static_cast<std::size_t>(p));
    out[p].assign(std::make_move_iterator(rows.begin() + b),
                  std::make_move_iterator(rows.begin() + e));
  }
  return out;
}

template <class T>
std::vector<T> flatten(Partitions<T> parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<T> out;
  out.reserve(total);
  for (auto& p : parts) {
    std::move(p.begin(), p.end(), std::back_inserter(out));
  }
  return out;
}

// Runs fn on every partition index, converting a user-function failure into
// Error(kTaskFailed) that names the partition.
inline void for_each_partition(ContextState& state, std::size_t n,
                               const std::function<void(std::size_t)>& fn) {
  parallel_for(n, state.workers, [&](std::size_t p) {
    try {
      fn(p);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kTaskFailed,
                  "dataflow: partition " + std::to_string(p) + ": " + e.what());
    }
  });
}

template <class T>
class RowsSource final : public Node<T> {
 public:
  RowsSource(std::vector<T> rows, int partitions)
      : Node<T>(partitions), rows_(std::move(rows)) {}

  Partitions<T> compute(ContextState& state) const override {
    state.source_reads++;
    return split_contiguous(rows_, this->partitions());
  }
  std::string describe() const override { return "rows"; }

 private:
  std::vector<T> rows_;
};

class TextFileSource final : public Node<std::string> {
 public:
  TextFileSource(const dfs::MiniDfs& dfs, std::string path, int partitions)
      : Node<std::string>(partitions), dfs_(dfs), path_(std::move(path)) {}

  Partitions<std::string> compute(ContextState& state) const override;
  std::string describe() const override { return "text_file(" + path_ + ")"; }

 private:
  const dfs::MiniDfs& dfs_;
  std::string path_;
};

// map, flat_map and filter: per-partition transformation, no data movement.
template <class In, class Out>
class NarrowNode final : public Node<Out> {
 public:
  using PartitionFn = std::function<void(const std::vector<In>&, std::vector<Out>&)>;

  NarrowNode(std::shared_ptr<const Node<In>> parent, std::string kind, PartitionFn fn)
      : Node<Out>(parent->partitions()),
        parent_(std::move(parent)),
        kind_(std::move(kind)),
        fn_(std::move(fn)) {}

  Partitions<Out> compute(ContextState& state) const override {
    Partitions<In> in = parent_->compute(state);
    Partitions<Out> out(in.size());
    for_each_partition(state, in.size(), [&](std::size_t p) {
      fn_(in[p], out[p]);
      std::vector<In>().swap(in[p]);
    });
    return out;
  }
  std::string describe() const override {
    return parent_->describe() + " -> " + kind_;
  }

 private:
  std::shared_ptr<const Node<In>> parent_;
  std::string kind_;
  PartitionFn fn_;
};

template <class K, class V>
class ReduceByKeyNode final : public Node<std::pair<K, V>> {
 public:
  using Combiner = std::function<V(const V&, const V&)>;

  ReduceByKeyNode(std::shared_ptr<const Node<std::pair<K, V>>> parent, Combiner f)
      : Node<std::pair<K, V>>(parent->partitions()),
        parent_(std::move(parent)),
        f_(std::move(f)) {}

  Partitions<std::pair<K, V>> compute(ContextState& state) const override {
    auto in = parent_->compute(state);
    std::vector<std::map<K, V>> partial(in.size());
    for_each_partition(state, in.size(), [&](std::size_t p) {
      auto& acc = partial[p];
      for (auto& [k, v] : in[p]) {
        auto it = acc.find(k);
        if (it == acc.end()) {
          acc.emplace(std::move(k), std::move(v));
        } else {
          it->second = f_(it->second, v);
        }
      }
      std::vector<std::pair<K, V>>().swap(in[p]);
    });
    std::map<K, V> merged;
    for (auto& acc : partial) {
      for (auto& [k, v] : acc) {
        auto it = merged.find(k);
        if (it == merged.end()) {
          merged.emplace(k, std::move(v));
        } else {
          it->second = f_(it->second, v);
        }
      }
    }
    std::vector<std::pair<K, V>> rows(std::make_move_iterator(merged.begin()),
                                      std::make_move_iterator(merged.end()));
    return split_contiguous(std::move(rows), this->partitions());
  }
  std::string describe() const override {
    return parent_->describe() + " -> reduce_by_key";
  }

 private:
  std::shared_ptr<const Node<std::pair<K, V>>> parent_;
  Combiner f_;
};

// Global sort on the key; equal keys are ordered by ascending value in both
// directions so the output is a total order.
template <class K, class V>
class SortByKeyNode final : public Node<std::pair<K, V>> {
 public:
  SortByKeyNode(std::shared_ptr<const Node<std::pair<K, V>>> parent, bool ascending)
      : Node<std::pair<K, V>>(parent->partitions()),
        parent_(std::move(parent)),
        ascending_(ascending) {}

  Partitions<std::pair<K, V>> compute(ContextState& state) const override {
    auto rows = flatten(parent_->compute(state));
    const bool asc = ascending_;
    std::sort(rows.begin(), rows.end(), [asc](const auto& a, const auto& b) {
      if (a.first < b.first) return asc;
      if (b.first < a.first) return !asc;
      return a.second < b.second;
    });
    return split_contiguous(std::move(rows), this->partitions());
  }
  std::string describe() const override {
    return parent_->describe() + (ascending_ ? " -> sort_by_key(asc)" : " -> sort_by_key(desc)");
  }

 private:
  std::shared_ptr<const Node<std::pair<K, V>>> parent_;
  bool ascending_;
};

template <class T>
struct is_pair : std::false_type {};
template <class A, class B>
struct is_pair<std::pair<A, B>> : std::true_type {};

}  // namespace detail

class Context {
 public:
  explicit Context(int workers = 1) : state_(std::make_shared<detail::ContextState>()) {
    state_->workers = std::max(workers, 1);
  }

  template <class T>
  Dataset<T> from_rows(std::vector<T> rows, int partitions = 1) const;

  // Lines of a minidfs text file. The file is read, and a missing path
  // reported, only when an action runs.
  Dataset<std::string> from_text_file(const dfs::MiniDfs& dfs, std::string path,
                                      int partitions = 1) const;

  int workers() const { return state_->workers; }
  // Source read counters; both stay at zero until an action runs.
  std::uint64_t bytes_read() const { return state_->bytes_read.load(); }
  std::uint64_t source_reads() const { return state_->source_reads.load(); }

 private:
  std::shared_ptr<detail::ContextState> state_;
};

template <class T>
class Dataset {
 public:
  using value_type = T;

  Dataset(std::shared_ptr<const detail::Node<T>> node,
          std::shared_ptr<detail::ContextState> state)
      : node_(std::move(node)), state_(std::move(state)) {}

  int partition_count() const { return node_->partitions(); }
  std::string plan() const { return node_->describe(); }

  template <class F>
  auto map(F f) const {
    using U = std::decay_t<std::invoke_result_t<F&, const T&>>;
    return chain<U>("map", [f](const std::vector<T>& in, std::vector<U>& out) {
      out.reserve(in.size());
      for (const auto& x : in) out.push_back(f(x));
    });
  }

  // f returns any iterable; its elements are concatenated in order.
  template <class F>
  auto flat_map(F f) const {
    using R = std::decay_t<std::invoke_result_t<F&, const T&>>;
    using U = std::decay_t<decltype(*std::begin(std::declval<R&>()))>;
    return chain<U>("flat_map", [f](const std::vector<T>& in, std::vector<U>& out) {
      for (const auto& x : in) {
        R r = f(x);
        for (auto& y : r) out.push_back(std::move(y));
      }
    });
  }

  template <class F>
  Dataset<T> filter(F pred) const {
    return chain<T>("filter", [pred](const std::vector<T>& in, std::vector<T>& out) {
      for (const auto& x : in) {
        if (pred(x)) out.push_back(x);
      }
    });
  }

  // f must be associative and commutative; per-key values are folded within
  // partitions first and the partial results merged in partition order.
  template <class F>
    requires detail::is_pair<T>::value
  Dataset<T> reduce_by_key(F f) const {
    using K = typename T::first_type;
    using V = typename T::second_type;
    auto node = std::make_shared<detail::ReduceByKeyNode<K, V>>(
        node_, [f](const V& a, const V& b) { return static_cast<V>(f(a, b)); });
    return Dataset<T>(std::move(node), state_);
  }

  Dataset<T> sort_by_key(bool ascending = true) const
    requires detail::is_pair<T>::value
  {
    using K = typename T::first_type;
    using V = typename T::second_type;
    auto node = std::make_shared<detail::SortByKeyNode<K, V>>(node_, ascending);
    return Dataset<T>(std::move(node), state_);
  }

  std::vector<T> collect() const { return detail::flatten(node_->compute(*state_)); }
  Partitions<T> collect_partitions() const { return node_->compute(*state_); }
  std::int64_t count() const {
    std::int64_t n = 0;
    for (const auto& p : node_->compute(*state_)) n += static_cast<std::int64_t>(p.size());
    return n;
  }

 private:
  template <class U>
  Dataset<U> chain(std::string kind,
                   typename detail::NarrowNode<T, U>::PartitionFn fn) const {
    auto node = std::make_shared<detail::NarrowNode<T, U>>(node_, std::move(kind),
                                                          std::move(fn));
    return Dataset<U>(std::move(node), state_);
  }

  std::shared_ptr<const detail::Node<T>> node_;
  std::shared_ptr<detail::ContextState> state_;
};

template <class T>
Dataset<T> Context::from_rows(std::vector<T> rows, int partitions) const {
  if (partitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "dataflow: partitions must be >= 1");
  }
  return Dataset<T>(std::make_shared<detail::RowsSource<T>>(std::move(rows), partitions),
                    state_);
}

}  // namespace miniplex::dataflow

#endif  // MINIPLEX_DATAFLOW_DATASET_H_
