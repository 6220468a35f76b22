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

#include "miniplex/mapreduce/job.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <optional>
#include <queue>

#include "miniplex/common/error.h"
#include "miniplex/common/hash.h"
#include "miniplex/common/parallel.h"
#include "miniplex/common/strings.h"
#include "miniplex/dfs/mini_dfs.h"

namespace miniplex::mapreduce {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using Bucket = std::vector<KVPair>;

bool key_less(const KVPair& a, const KVPair& b) { return a.key < b.key; }

// Removes the per-job spill directory on scope exit.
class SpillDir {
 public:
  explicit SpillDir(const fs::path& parent) {
    static std::atomic<int> counter{0};
    fs::path base = parent.empty() ? fs::temp_directory_path() : parent;
    path_ = base / ("miniplex-mr-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~SpillDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  SpillDir(const SpillDir&) = delete;
  SpillDir& operator=(const SpillDir&) = delete;

  fs::path run_file(std::size_t split, std::size_t reducer) const {
    return path_ / ("map-" + std::to_string(split) + "-part-" + std::to_string(reducer) + ".run");
  }

 private:
  fs::path path_;
};

std::int64_t write_run(const fs::path& file, const Bucket& bucket) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "mapreduce: cannot create " + file.string());
  std::int64_t bytes = 0;
  for (const auto& kv : bucket) {
    std::string line = encode_datum(kv.key) + '\t' + encode_datum(kv.value) + '\n';
    bytes += static_cast<std::int64_t>(line.size());
    out << line;
  }
  if (!out) throw Error(ErrorCode::kIo, "mapreduce: write failed " + file.string());
  return bytes;
}

// Streams one sorted run back from disk.
class RunReader {
 public:
  explicit RunReader(const fs::path& file) : in_(file, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kIo, "mapreduce: cannot open " + file.string());
    advance();
  }
  bool done() const { return done_; }
  const KVPair& current() const { return current_; }
  void advance() {
    std::string line;
    if (!std::getline(in_, line)) {
      done_ = true;
      return;
    }
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kCorruption, "mapreduce: malformed spill line");
    }
    current_.key = decode_datum(std::string_view(line).substr(0, tab));
    current_.value = decode_datum(std::string_view(line).substr(tab + 1));
  }

 private:
  std::ifstream in_;
  KVPair current_;
  bool done_ = false;
};

Bucket merge_runs(const SpillDir& spill, std::size_t splits, std::size_t reducer) {
  std::vector<RunReader> readers;
  readers.reserve(splits);
  for (std::size_t s = 0; s < splits; ++s) readers.emplace_back(spill.run_file(s, reducer));
  // Min-heap on (key, run index): equal keys drain in split order.
  auto greater = [&readers](std::size_t a, std::size_t b) {
    const auto& ka = readers[a].current().key;
    const auto& kb = readers[b].current().key;
    if (ka != kb) return kb < ka;
    return b < a;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(greater)> heap(greater);
  for (std::size_t s = 0; s < splits; ++s) {
    if (!readers[s].done()) heap.push(s);
  }
  Bucket merged;
  while (!heap.empty()) {
    std::size_t s = heap.top();
    heap.pop();
    merged.push_back(readers[s].current());
    readers[s].advance();
    if (!readers[s].done()) heap.push(s);
  }
  return merged;
}

void validate(const JobSpec& spec) {
  if (spec.num_map_splits < 1) {
    throw Error(ErrorCode::kInvalidArgument, "mapreduce: num_map_splits must be >= 1");
  }
  if (spec.num_reducers < 1) {
    throw Error(ErrorCode::kInvalidArgument, "mapreduce: num_reducers must be >= 1");
  }
  if (!spec.mapper || !spec.reducer) {
    throw Error(ErrorCode::kInvalidArgument, "mapreduce: mapper and reducer are required");
  }
}

}  // namespace

std::string encode_datum(const Datum& d) {
  if (const auto* i = std::get_if<std::int64_t>(&d)) return "i" + std::to_string(*i);
  return "s" + escape_field(std::get<std::string>(d));
}

Datum decode_datum(std::string_view encoded) {
  if (!encoded.empty() && encoded.front() == 'i') {
    if (auto v = parse_int64(encoded.substr(1))) return *v;
  } else if (!encoded.empty() && encoded.front() == 's') {
    return unescape_field(encoded.substr(1));
  }
  throw Error(ErrorCode::kCorruption, "mapreduce: bad datum '" + std::string(encoded) + "'");
}

std::string to_string(const Datum& d) {
  if (const auto* i = std::get_if<std::int64_t>(&d)) return std::to_string(*i);
  return std::get<std::string>(d);
}

std::size_t partition_for(const Datum& key, int num_reducers) {
  return static_cast<std::size_t>(fnv1a64(encode_datum(key)) %
                                  static_cast<std::uint64_t>(num_reducers));
}

JobResult run_job(const dfs::MiniDfs& dfs, const JobSpec& spec) {
  validate(spec);
  for (const auto& in : spec.inputs) {
    if (!dfs.exists(in)) throw Error(ErrorCode::kNotFound, "mapreduce: missing input " + in);
  }
  std::vector<std::string> records;
  for (const auto& in : spec.inputs) {
    auto lines = split_lines(dfs.get_file(in));
    std::move(lines.begin(), lines.end(), std::back_inserter(records));
  }
  return run_job_on_records(std::move(records), spec);
}

JobResult run_job_on_records(std::vector<std::string> records, const JobSpec& spec) {
  validate(spec);
  JobResult result;
  const auto splits = static_cast<std::size_t>(spec.num_map_splits);
  const auto reducers = static_cast<std::size_t>(spec.num_reducers);

  // Split.
  auto t0 = Clock::now();
  std::vector<std::pair<std::size_t, std::size_t>> ranges(splits);
  for (std::size_t s = 0; s < splits; ++s) ranges[s] = contiguous_range(records.size(), splits, s);
  result.counters.map_input_records = static_cast<std::int64_t>(records.size());

  // Map: buckets[split][reducer].
  auto t1 = Clock::now();
  std::vector<std::vector<Bucket>> buckets(splits, std::vector<Bucket>(reducers));
  std::vector<std::int64_t> emitted(splits, 0);
  std::optional<SpillDir> spill;
  if (spec.spill_mode == SpillMode::kOnDisk) spill.emplace(spec.spill_dir);
  std::vector<std::int64_t> spill_bytes(splits, 0);
  parallel_for(splits, spec.workers, [&](std::size_t s) {
    auto [begin, end] = ranges[s];
    auto& mine = buckets[s];
    try {
      for (std::size_t r = begin; r < end; ++r) {
        for (auto& kv : spec.mapper(records[r])) {
          mine[partition_for(kv.key, spec.num_reducers)].push_back(std::move(kv));
          ++emitted[s];
        }
      }
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kTaskFailed,
                  "mapreduce: map split " + std::to_string(s) + " failed: " + e.what());
    }
    if (spill) {
      for (std::size_t r = 0; r < reducers; ++r) {
        std::stable_sort(mine[r].begin(), mine[r].end(), key_less);
        spill_bytes[s] += write_run(spill->run_file(s, r), mine[r]);
        Bucket().swap(mine[r]);
      }
    }
  });
  for (auto n : emitted) result.counters.map_output_records += n;
  if (spill) {
    result.counters.spill_files = static_cast<std::int64_t>(splits * reducers);
    for (auto b : spill_bytes) result.counters.spill_bytes += b;
  }

  // Shuffle.
  auto t2 = Clock::now();
  std::vector<Bucket> reducer_input(reducers);
  parallel_for(reducers, spec.workers, [&](std::size_t r) {
    if (spill) {
      reducer_input[r] = merge_runs(*spill, splits, r);
      return;
    }
    Bucket& in = reducer_input[r];
    for (std::size_t s = 0; s < splits; ++s) {
      std::move(buckets[s][r].begin(), buckets[s][r].end(), std::back_inserter(in));
      Bucket().swap(buckets[s][r]);
    }
    std::stable_sort(in.begin(), in.end(), key_less);
  });
  for (const auto& in : reducer_input) {
    result.counters.shuffle_input_records += static_cast<std::int64_t>(in.size());
  }

  // Reduce.
  auto t3 = Clock::now();
  std::vector<std::vector<KVPair>> reducer_output(reducers);
  std::vector<std::vector<Datum>> reducer_keys(reducers);
  std::vector<std::int64_t> consumed(reducers, 0);
  parallel_for(reducers, spec.workers, [&](std::size_t r) {
    const Bucket& in = reducer_input[r];
    std::vector<Datum> values;
    try {
      for (std::size_t i = 0; i < in.size();) {
        std::size_t j = i;
        values.clear();
        while (j < in.size() && in[j].key == in[i].key) values.push_back(in[j++].value);
        consumed[r] += static_cast<std::int64_t>(values.size());
        reducer_keys[r].push_back(in[i].key);
        for (auto& kv : spec.reducer(in[i].key, values)) reducer_output[r].push_back(std::move(kv));
        i = j;
      }
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kTaskFailed,
                  "mapreduce: reducer " + std::to_string(r) + " failed: " + e.what());
    }
  });
  for (std::size_t r = 0; r < reducers; ++r) {
    result.reducer_offsets.push_back(result.output.size());
    result.counters.reduce_input_groups += static_cast<std::int64_t>(reducer_keys[r].size());
    result.counters.reduce_input_records += consumed[r];
    result.counters.reduce_output_records += static_cast<std::int64_t>(reducer_output[r].size());
    std::move(reducer_output[r].begin(), reducer_output[r].end(),
              std::back_inserter(result.output));
  }
  result.reducer_offsets.push_back(result.output.size());
  result.reducer_keys = std::move(reducer_keys);
  auto t4 = Clock::now();

  result.timings = {t1 - t0, t2 - t1, t3 - t2, t4 - t3};
  return result;
}

}  // namespace miniplex::mapreduce
