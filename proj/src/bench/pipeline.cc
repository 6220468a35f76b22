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

#include "miniplex/bench/pipeline.h"

#include <algorithm>
#include <set>

#include "miniplex/cfstore/cf_store.h"
#include "miniplex/common/error.h"
#include "miniplex/common/hash.h"
#include "miniplex/dfs/mini_dfs.h"
#include "miniplex/tablestore/catalog.h"

namespace miniplex::bench {
namespace {

constexpr tasks::InfluenceEngine kInfluenceEngines[] = {tasks::InfluenceEngine::kSqlExternal,
                                                        tasks::InfluenceEngine::kSqlInternal,
                                                        tasks::InfluenceEngine::kCfScan};
constexpr tasks::TermsEngine kTermsEngines[] = {tasks::TermsEngine::kMapReduce,
                                                tasks::TermsEngine::kDataflow};

std::string graph_output(const tasks::GraphReport& r) {
  return tasks::degrees_csv(r.degrees) + tasks::components_csv(r.components) + r.edge_list;
}

}  // namespace

std::vector<BenchCell> make_cells(const dfs::MiniDfs& dfs, const tablestore::Catalog& catalog,
                                  const cfstore::CfStore& cf, const MatrixOptions& o) {
  // (task, engine) in request order, without repeats.
  std::vector<std::pair<std::string, std::string>> wanted;
  auto want = [&wanted](std::string task, std::string engine) {
    auto cell = std::make_pair(std::move(task), std::move(engine));
    if (std::find(wanted.begin(), wanted.end(), cell) == wanted.end()) wanted.push_back(cell);
  };
  for (const auto& entry : o.matrix) {
    const auto colon = entry.find(':');
    const std::string task = entry.substr(0, colon);
    const std::string engine = colon == std::string::npos ? "" : entry.substr(colon + 1);
    if (task == "all" && engine.empty()) {
      for (auto e : kInfluenceEngines) want("influence", std::string(tasks::engine_name(e)));
      for (auto e : kTermsEngines) want("terms", std::string(tasks::engine_name(e)));
      if (o.follows_csv) want("graph", "graph");
    } else if (task == "influence") {
      if (engine.empty()) {
        for (auto e : kInfluenceEngines) want(task, std::string(tasks::engine_name(e)));
      } else if (auto e = tasks::parse_influence_engine(engine)) {
        want(task, std::string(tasks::engine_name(*e)));
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown influence engine '" + engine + "'");
      }
    } else if (task == "terms") {
      if (engine.empty()) {
        for (auto e : kTermsEngines) want(task, std::string(tasks::engine_name(e)));
      } else if (auto e = tasks::parse_terms_engine(engine)) {
        want(task, std::string(tasks::engine_name(*e)));
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown terms engine '" + engine + "'");
      }
    } else if (task == "graph" && (engine.empty() || engine == "graph")) {
      if (!o.follows_csv) {
        throw Error(ErrorCode::kInvalidArgument, "the graph task needs a follows CSV");
      }
      want("graph", "graph");
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown matrix entry '" + entry + "'");
    }
  }

  std::vector<BenchCell> cells;
  for (const auto& [task, engine] : wanted) {
    BenchCell cell{task, engine, {}};
    if (task == "influence") {
      tasks::InfluenceOptions io{*tasks::parse_influence_engine(engine), o.formula, o.scope};
      cell.run = [&catalog, &cf, io] {
        return tasks::influence_csv(tasks::task_influence(catalog, cf, io));
      };
    } else if (task == "terms") {
      tasks::TermsOptions to = o.terms;
      to.engine = *tasks::parse_terms_engine(engine);
      cell.run = [&dfs, to, path = o.tweets_path] {
        return tasks::terms_csv(tasks::task_terms(dfs, path, to));
      };
    } else {
      cell.run = [&catalog, follows = *o.follows_csv] {
        return graph_output(tasks::task_graph(catalog, follows));
      };
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

EndToEndResult run_end_to_end(dfs::MiniDfs& dfs, tablestore::Catalog& catalog,
                              cfstore::CfStore& cf, const EndToEndOptions& o) {
  EndToEndResult result;
  const auto data = generate_data(o.spec);
  ingest::Ingestor ingestor(dfs, o.clock);
  result.batch = ingestor.preprocess(ingestor.land_bytes(data.tweets_jsonl).batch_id);
  ingest::load_all(dfs, catalog, cf, result.batch);

  std::set<std::string> paths;
  auto report = [&](const std::string& dir, const std::string& name, const std::string& body) {
    paths.insert(tasks::write_report(dfs, dir, name, body));
  };

  GenManifest gm;
  gm.spec = o.spec;
  gm.tweets = o.spec.n_tweets;
  gm.users = o.spec.n_tweets > 0 ? o.spec.n_users : 0;
  gm.follows = data.follows;
  for (const auto& [name, body] : {std::pair<std::string, const std::string*>{
                                       "tweets.jsonl", &data.tweets_jsonl},
                                   {"users.jsonl", &data.users_jsonl},
                                   {"follows.csv", &data.follows_csv}}) {
    gm.files.push_back({name, body->size(), hex64(fnv1a64(*body))});
  }
  report(o.run_id, "dataset.json", manifest_json(gm));

  for (auto f : {tasks::Formula::kProse, tasks::Formula::kVerbatim}) {
    for (auto e : kInfluenceEngines) {
      report(o.run_id,
             "influence_" + std::string(tasks::engine_name(e)) + "_" +
                 std::string(tasks::formula_name(f)) + ".csv",
             tasks::influence_csv(tasks::task_influence(catalog, cf, {e, f, std::nullopt})));
    }
  }
  tasks::TermsOptions terms;
  terms.stopwords = o.stopwords;
  terms.workers = o.workers;
  for (auto e : kTermsEngines) {
    terms.engine = e;
    report(o.run_id, "terms_" + std::string(tasks::engine_name(e)) + ".csv",
           tasks::terms_csv(tasks::task_terms(dfs, result.batch.tweets_path, terms)));
  }
  const auto g = tasks::task_graph(catalog, data.follows_csv);
  report(o.run_id, "graph_degrees.csv", tasks::degrees_csv(g.degrees));
  report(o.run_id, "graph_components.csv", tasks::components_csv(g.components));
  report(o.run_id, "graph_edges.csv", g.edge_list);

  MatrixOptions mo;
  mo.terms = terms;
  mo.tweets_path = result.batch.tweets_path;
  mo.follows_csv = data.follows_csv;
  BenchOptions bo;
  bo.dataset = o.dataset;
  bo.repetitions = o.repetitions;
  result.bench = run_bench(make_cells(dfs, catalog, cf, mo), bo);
  const std::string bench_dir = "bench/" + o.run_id;
  for (auto f : {ReportFormat::kCsv, ReportFormat::kMarkdown, ReportFormat::kSvg}) {
    report(bench_dir, "bench." + std::string(report_extension(f)), render_report(result.bench, f));
  }
  report(bench_dir, "results.json", report_json(result.bench));

  result.report_paths.assign(paths.begin(), paths.end());
  return result;
}

std::string report_digest(const dfs::MiniDfs& dfs, const std::vector<std::string>& paths) {
  std::string out;
  for (const auto& p : paths) {
    out += p + " " + hex64(fnv1a64(without_timings(p, dfs.get_file(p)))) + "\n";
  }
  return out;
}

}  // namespace miniplex::bench
