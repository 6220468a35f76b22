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

// Batch ingestion of tweet JSON Lines.
//
//   land        copies a local file unmodified to /landing/<batch>/raw.jsonl
//   preprocess  cleanses, deduplicates and normalizes the raw lines into
//               /data/<batch>/tweets.jsonl and /data/<batch>/users.jsonl
//   load_all    registers or loads the outputs into the table store and the
//               column-family store and checks that every target agrees
//
// Batch ids are b000001, b000002, ... in landing order. Each batch has a
// manifest at /landing/<batch>/manifest.json.

#ifndef MINIPLEX_INGEST_INGEST_H_
#define MINIPLEX_INGEST_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "miniplex/tablestore/schema.h"

namespace miniplex::dfs {
class MiniDfs;
}
namespace miniplex::tablestore {
class Catalog;
}
namespace miniplex::cfstore {
class CfStore;
}

namespace miniplex::ingest {

struct BatchStats {
  std::int64_t read = 0;  // non-blank lines
  std::int64_t malformed = 0;
  std::int64_t duplicates = 0;
  std::int64_t emitted_tweets = 0;
  std::int64_t emitted_users = 0;

  bool operator==(const BatchStats&) const = default;
};

struct BatchManifest {
  std::string batch_id;
  std::string landed_at;
  std::string raw_path;
  std::uint64_t raw_bytes = 0;
  std::string raw_checksum;
  bool preprocessed = false;
  std::string preprocessed_at;
  std::string tweets_path;
  std::string users_path;
  BatchStats stats;
};

// UTC timestamp text, e.g. "2026-01-02T03:04:05Z".
using Clock = std::function<std::string()>;
std::string utc_now();

struct PreprocessOutput {
  std::string tweets_jsonl;
  std::string users_jsonl;
  BatchStats stats;
};

// The preprocessing step on its own. A line is malformed when it is not a
// JSON object, lacks a non-empty id or author_id (string or integer), has
// a non-string text, or has a counter that is negative or not an integer.
// Absent or null counters become 0. The first record with an id wins.
// batch_id and ingested_at are added unless the record already has them,
// so preprocessing an output again reproduces it byte for byte.
PreprocessOutput preprocess_records(std::string_view raw, const std::string& batch_id,
                                    const std::string& ingested_at);

class Ingestor {
 public:
  explicit Ingestor(dfs::MiniDfs& dfs, Clock clock = utc_now);

  BatchManifest land(const std::filesystem::path& local_file);
  BatchManifest land_bytes(std::string_view content);
  BatchManifest preprocess(const std::string& batch_id);

  BatchManifest manifest(const std::string& batch_id) const;
  std::vector<std::string> batches() const;
  std::optional<std::string> latest_batch() const;

 private:
  void write_manifest(const BatchManifest& m);

  dfs::MiniDfs& dfs_;
  Clock clock_;
  std::mutex mu_;
};

enum class Target { kTableExternal, kTableInternal, kCfStore };

std::optional<Target> parse_target(std::string_view name);
std::string_view target_name(Target t);

inline constexpr const char* kTweetsTable = "tweets";
inline constexpr const char* kTweetsInternalTable = "tweets_internal";
inline constexpr const char* kUsersTable = "users";
inline constexpr const char* kCfTweetsTable = "tweets";

tablestore::TableSchema tweets_schema(const std::string& name = kTweetsTable);
tablestore::TableSchema users_schema(const std::string& name = kUsersTable);

struct LoadOptions {
  std::set<Target> targets = {Target::kTableExternal, Target::kTableInternal, Target::kCfStore};
  // Drop tables left by an earlier load before loading.
  bool replace_existing = true;
};

struct LoadReport {
  std::string batch_id;
  std::vector<std::pair<Target, std::int64_t>> tweet_counts;
  std::int64_t users = 0;
};

// Throws Error(kMismatch) when the targets disagree on the tweet count or
// any of them differs from the batch's emitted_tweets.
LoadReport load_all(dfs::MiniDfs& dfs, tablestore::Catalog& catalog, cfstore::CfStore& cf,
                    const BatchManifest& batch, const LoadOptions& options = {});

}  // namespace miniplex::ingest

#endif  // MINIPLEX_INGEST_INGEST_H_
