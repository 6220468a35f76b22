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

// Embedded MapReduce engine.
//
// A job runs four phases over the lines of one or more minidfs files:
//
//   split    records are cut into num_map_splits contiguous line ranges
//   map      each split is mapped independently (in parallel)
//   shuffle  every pair goes to reducer fnv1a64(encode(key)) % num_reducers,
//            and each reducer's input is sorted by key
//   reduce   each reducer walks its key groups in ascending key order
//
// Output is the concatenation of reducer outputs in reducer-index order.
// Within a key group, values arrive in (split index, emission order), in both
// spill modes, so results are bit-identical for any worker count.
//
// In SpillMode::kOnDisk every map task writes one sorted run file per reducer
// (`key<TAB>value` lines) and the shuffle k-way merges those runs back from
// disk, i.e. the intermediate I/O that an in-memory engine avoids.

#ifndef MINIPLEX_MAPREDUCE_JOB_H_
#define MINIPLEX_MAPREDUCE_JOB_H_

#include <chrono>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace miniplex::dfs {
class MiniDfs;
}

namespace miniplex::mapreduce {

// Keys and values are integers or text. Integers order before text.
using Datum = std::variant<std::int64_t, std::string>;

struct KVPair {
  Datum key;
  Datum value;

  auto operator<=>(const KVPair&) const = default;
  bool operator==(const KVPair&) const = default;
};

using Mapper = std::function<std::vector<KVPair>(std::string_view record)>;
using Reducer =
    std::function<std::vector<KVPair>(const Datum& key, const std::vector<Datum>& values)>;

enum class SpillMode { kInMemory, kOnDisk };

struct JobSpec {
  std::vector<std::string> inputs;
  Mapper mapper;
  Reducer reducer;
  int num_map_splits = 1;
  int num_reducers = 1;
  SpillMode spill_mode = SpillMode::kInMemory;
  int workers = 1;
  // Parent directory for on-disk runs; the system temp dir when empty.
  std::filesystem::path spill_dir;
};

struct PhaseTimings {
  std::chrono::nanoseconds split{0};
  std::chrono::nanoseconds map{0};
  std::chrono::nanoseconds shuffle{0};
  std::chrono::nanoseconds reduce{0};
};

struct Counters {
  std::int64_t map_input_records = 0;
  std::int64_t map_output_records = 0;
  std::int64_t shuffle_input_records = 0;
  std::int64_t reduce_input_groups = 0;
  std::int64_t reduce_input_records = 0;
  std::int64_t reduce_output_records = 0;
  std::int64_t spill_files = 0;
  std::int64_t spill_bytes = 0;
};

struct JobResult {
  std::vector<KVPair> output;
  // output[reducer_offsets[r] .. reducer_offsets[r + 1]) came from reducer r.
  std::vector<std::size_t> reducer_offsets;
  // Per reducer, the keys in the order they were reduced.
  std::vector<std::vector<Datum>> reducer_keys;
  PhaseTimings timings;
  Counters counters;
};

JobResult run_job(const dfs::MiniDfs& dfs, const JobSpec& spec);

// Same engine over records already in memory; spec.inputs is ignored.
JobResult run_job_on_records(std::vector<std::string> records, const JobSpec& spec);

// Reducer index of a key.
std::size_t partition_for(const Datum& key, int num_reducers);

// Tagged text form used in spill files: "i<decimal>" or "s<escaped text>".
std::string encode_datum(const Datum& d);
Datum decode_datum(std::string_view encoded);

std::string to_string(const Datum& d);

}  // namespace miniplex::mapreduce

#endif  // MINIPLEX_MAPREDUCE_JOB_H_
