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

// The three analytic tasks and the engines each can run on.
//
//   influence  per-author engagement sums, over the external table, the
//              internal table, or a scan of the column-family table
//   terms      term frequencies over tweet text, on the MapReduce engine or
//              the dataflow engine
//   graph      follower degrees and weak components
//
// Every engine of a task produces the same rows; reports are CSV with a
// fixed column order so engines can be compared by file hash.

#ifndef MINIPLEX_TASKS_TASKS_H_
#define MINIPLEX_TASKS_TASKS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "miniplex/dataflow/tokenize.h"
#include "miniplex/graph/graph.h"

namespace miniplex::dfs {
class MiniDfs;
}
namespace miniplex::tablestore {
class Catalog;
}
namespace miniplex::cfstore {
class CfStore;
}

namespace miniplex::tasks {

enum class InfluenceEngine { kSqlExternal, kSqlInternal, kCfScan };
enum class Formula { kProse, kVerbatim };
enum class TermsEngine { kMapReduce, kDataflow };

std::optional<InfluenceEngine> parse_influence_engine(std::string_view name);
std::optional<Formula> parse_formula(std::string_view name);
std::optional<TermsEngine> parse_terms_engine(std::string_view name);
std::string_view engine_name(InfluenceEngine e);
std::string_view engine_name(TermsEngine e);
std::string_view formula_name(Formula f);

struct InfluenceRow {
  std::string author_id;
  std::int64_t impressions = 0;
  std::int64_t likes = 0;
  std::int64_t quotes = 0;
  std::int64_t replies = 0;
  std::int64_t retweets = 0;
  std::int64_t influence = 0;

  bool operator==(const InfluenceRow&) const = default;
};

// prose:    impressions + likes + quotes + replies + retweets
// verbatim: impressions + likes + likes + replies + retweets, as the
//           published query has it (like_count twice, no quote_count)
std::int64_t influence_of(const InfluenceRow& sums, Formula formula);

// The query text run by the SQL engines against `table`.
std::string influence_sql(Formula formula, std::string_view table);

struct InfluenceOptions {
  InfluenceEngine engine = InfluenceEngine::kSqlExternal;
  Formula formula = Formula::kProse;
  // Case-insensitive keyword that tweet text must contain.
  std::optional<std::string> scope;
};

// Rows by descending influence, then ascending author_id. NULL sums count
// as 0.
std::vector<InfluenceRow> task_influence(const tablestore::Catalog& catalog,
                                         const cfstore::CfStore& cf,
                                         const InfluenceOptions& options);

std::string influence_csv(const std::vector<InfluenceRow>& rows);

struct TermRow {
  std::string term;
  std::int64_t count = 0;

  bool operator==(const TermRow&) const = default;
};

struct TermsOptions {
  TermsEngine engine = TermsEngine::kDataflow;
  dataflow::StopWords stopwords;
  bool extended_normalization = false;
  int splits = 4;    // map splits, or dataflow partitions
  int reducers = 4;  // MapReduce only
  int workers = 1;
};

// Text field of one tweet JSON line; empty when absent or unparseable.
std::string tweet_text(std::string_view json_line);

// Counts over the text of every tweet in a JSON Lines file, sorted by
// count descending, then term ascending.
std::vector<TermRow> task_terms(const dfs::MiniDfs& dfs, const std::string& tweets_path,
                                const TermsOptions& options);

std::string terms_csv(const std::vector<TermRow>& rows);

struct GraphReport {
  std::vector<graph::DegreeRow> degrees;
  std::vector<std::pair<std::string, std::string>> components;
  std::string edge_list;
  graph::BuildStats stats;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::size_t component_count = 0;
};

// Users come from `SELECT id, username FROM users`.
GraphReport task_graph(const tablestore::Catalog& catalog, std::string_view follows_csv,
                       const graph::BuildOptions& options = {});

std::string degrees_csv(const std::vector<graph::DegreeRow>& rows);
std::string components_csv(const std::vector<std::pair<std::string, std::string>>& rows);

// Writes /reports/<run_id>/<name>, replacing an earlier file.
std::string write_report(dfs::MiniDfs& dfs, const std::string& run_id, const std::string& name,
                         std::string_view content);

}  // namespace miniplex::tasks

#endif  // MINIPLEX_TASKS_TASKS_H_
