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

// Bench cells over loaded stores, and the full generate-to-report run.

#ifndef MINIPLEX_BENCH_PIPELINE_H_
#define MINIPLEX_BENCH_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "miniplex/bench/bench.h"
#include "miniplex/bench/generator.h"
#include "miniplex/ingest/ingest.h"
#include "miniplex/tasks/tasks.h"

namespace miniplex::bench {

struct MatrixOptions {
  // "all", a task ("influence", "terms", "graph"), or task:engine.
  std::vector<std::string> matrix = {"all"};
  tasks::Formula formula = tasks::Formula::kProse;
  std::optional<std::string> scope;
  tasks::TermsOptions terms;  // engine is set per cell
  std::string tweets_path;    // preprocessed tweets in the dfs
  // Contents of a follows CSV. "all" leaves the graph task out without it.
  std::optional<std::string> follows_csv;
};

// Throws kInvalidArgument for unknown tasks or engines.
std::vector<BenchCell> make_cells(const dfs::MiniDfs& dfs, const tablestore::Catalog& catalog,
                                  const cfstore::CfStore& cf, const MatrixOptions& options);

struct EndToEndOptions {
  GenSpec spec;
  std::string run_id = "e2e";
  std::string dataset = "e2e";
  int repetitions = kDefaultRepetitions;
  ingest::Clock clock = ingest::utc_now;
  dataflow::StopWords stopwords;
  int workers = 1;
};

struct EndToEndResult {
  ingest::BatchManifest batch;
  BenchReport bench;
  std::vector<std::string> report_paths;  // dfs paths, sorted
};

// generate -> land -> preprocess -> load_all -> every task on every engine
// -> bench. Task reports go to /reports/<run_id>/, bench reports to
// /reports/bench/<run_id>/.
EndToEndResult run_end_to_end(dfs::MiniDfs& dfs, tablestore::Catalog& catalog,
                              cfstore::CfStore& cf, const EndToEndOptions& options);

// One "<path> <fnv1a64>" line per report, hashed with timings removed.
std::string report_digest(const dfs::MiniDfs& dfs, const std::vector<std::string>& paths);

}  // namespace miniplex::bench

#endif  // MINIPLEX_BENCH_PIPELINE_H_
