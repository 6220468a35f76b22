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

#include "miniplex/tasks/tasks.h"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "miniplex/cfstore/cf_store.h"
#include "miniplex/common/csv.h"
#include "miniplex/common/error.h"
#include "miniplex/common/strings.h"
#include "miniplex/dataflow/word_count.h"
#include "miniplex/dfs/mini_dfs.h"
#include "miniplex/ingest/ingest.h"
#include "miniplex/mapreduce/job.h"
#include "miniplex/mapreduce/word_count.h"
#include "miniplex/tablestore/catalog.h"

namespace miniplex::tasks {
namespace {

std::int64_t int_or_zero(const tablestore::Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return 0;
}

void rank(std::vector<InfluenceRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const InfluenceRow& a, const InfluenceRow& b) {
    if (a.influence != b.influence) return a.influence > b.influence;
    return a.author_id < b.author_id;
  });
}

std::vector<InfluenceRow> influence_sql_engine(const tablestore::Catalog& catalog,
                                               const InfluenceOptions& o) {
  const char* table = o.engine == InfluenceEngine::kSqlInternal ? ingest::kTweetsInternalTable
                                                                : ingest::kTweetsTable;
  tablestore::QueryOptions qo;
  if (o.scope) qo.scope = tablestore::RowScope{"text", *o.scope};
  auto rs = catalog.query(influence_sql(o.formula, table), qo);
  std::vector<InfluenceRow> rows;
  rows.reserve(rs.rows.size());
  for (const auto& r : rs.rows) {
    InfluenceRow row;
    row.author_id = tablestore::to_display(r[0]);
    row.impressions = int_or_zero(r[1]);
    row.likes = int_or_zero(r[2]);
    row.quotes = int_or_zero(r[3]);
    row.replies = int_or_zero(r[4]);
    row.retweets = int_or_zero(r[5]);
    // A NULL influence means some sum was NULL; recompute from the zeros.
    row.influence = tablestore::is_null(r[6]) ? influence_of(row, o.formula) : int_or_zero(r[6]);
    rows.push_back(std::move(row));
  }
  rank(rows);
  return rows;
}

std::vector<InfluenceRow> influence_cf_engine(const cfstore::CfStore& cf,
                                              const InfluenceOptions& o) {
  cfstore::ScanOptions so;
  so.qualifiers = std::set<std::string>{"author_id"};
  for (const char* q : cfstore::kTweetMetricQualifiers) so.qualifiers->insert(q);
  if (o.scope) {
    so.qualifiers->insert("text");
  } else {
    so.family = "m";
  }
  std::map<std::string, InfluenceRow> by_author;
  auto scanner = cf.scan(ingest::kCfTweetsTable, so);
  cfstore::ScanRow row;
  while (scanner.next(row)) {
    const std::string* author = nullptr;
    const std::string* text = nullptr;
    std::int64_t metrics[5] = {};
    for (const auto& c : row.cells) {
      if (c.family == "t") {
        if (c.qualifier == "text") text = &c.value;
        continue;
      }
      if (c.qualifier == "author_id") {
        author = &c.value;
        continue;
      }
      for (int i = 0; i < 5; ++i) {
        if (c.qualifier != cfstore::kTweetMetricQualifiers[i]) continue;
        auto v = parse_int64(c.value);
        if (!v) {
          throw Error(ErrorCode::kCorruption,
                      "cf row " + row.row_key + ": " + c.qualifier + " is not an integer");
        }
        metrics[i] = *v;
      }
    }
    if (!author) continue;
    if (o.scope) {
      if (!text || to_lower_ascii(*text).find(to_lower_ascii(*o.scope)) == std::string::npos) {
        continue;
      }
    }
    auto& acc = by_author[*author];
    acc.author_id = *author;
    acc.impressions += metrics[0];
    acc.likes += metrics[1];
    acc.quotes += metrics[2];
    acc.replies += metrics[3];
    acc.retweets += metrics[4];
  }
  std::vector<InfluenceRow> rows;
  rows.reserve(by_author.size());
  for (auto& [a, r] : by_author) {
    r.influence = influence_of(r, o.formula);
    rows.push_back(std::move(r));
  }
  rank(rows);
  return rows;
}

}  // namespace

std::optional<InfluenceEngine> parse_influence_engine(std::string_view name) {
  if (name == "sql-external") return InfluenceEngine::kSqlExternal;
  if (name == "sql-internal") return InfluenceEngine::kSqlInternal;
  if (name == "cf-scan") return InfluenceEngine::kCfScan;
  return std::nullopt;
}

std::optional<Formula> parse_formula(std::string_view name) {
  if (name == "prose") return Formula::kProse;
  if (name == "verbatim") return Formula::kVerbatim;
  return std::nullopt;
}

std::optional<TermsEngine> parse_terms_engine(std::string_view name) {
  if (name == "mr" || name == "mapreduce") return TermsEngine::kMapReduce;
  if (name == "flow" || name == "dataflow") return TermsEngine::kDataflow;
  return std::nullopt;
}

std::string_view engine_name(InfluenceEngine e) {
  switch (e) {
    case InfluenceEngine::kSqlExternal: return "sql-external";
    case InfluenceEngine::kSqlInternal: return "sql-internal";
    case InfluenceEngine::kCfScan: return "cf-scan";
  }
  return "?";
}

std::string_view engine_name(TermsEngine e) {
  return e == TermsEngine::kMapReduce ? "mapreduce" : "dataflow";
}

std::string_view formula_name(Formula f) { return f == Formula::kProse ? "prose" : "verbatim"; }

std::int64_t influence_of(const InfluenceRow& s, Formula formula) {
  if (formula == Formula::kVerbatim) {
    return s.impressions + s.likes + s.likes + s.replies + s.retweets;
  }
  return s.impressions + s.likes + s.quotes + s.replies + s.retweets;
}

std::string influence_sql(Formula formula, std::string_view table) {
  std::string sql =
      "SELECT author_id,\n"
      "SUM(public_metrics.impression_count) AS impressions,\n"
      "SUM(public_metrics.like_count) as likes,\n"
      "SUM(public_metrics.quote_count) as quotes, \n"
      "SUM(public_metrics.reply_count) as replies,\n"
      "SUM(public_metrics.retweet_count) AS retweets,\n"
      "SUM(public_metrics.impression_count) + \n"
      "SUM(public_metrics.like_count) + \n";
  sql += formula == Formula::kVerbatim ? "SUM(public_metrics.like_count) + \n"
                                       : "SUM(public_metrics.quote_count) + \n";
  sql +=
      "SUM(public_metrics.reply_count) +\n"
      "SUM(public_metrics.retweet_count) AS influence\n"
      "FROM ";
  sql += table;
  sql += " GROUP BY author_id ORDER BY influence DESC";
  return sql;
}

std::vector<InfluenceRow> task_influence(const tablestore::Catalog& catalog,
                                         const cfstore::CfStore& cf,
                                         const InfluenceOptions& options) {
  if (options.engine == InfluenceEngine::kCfScan) {
    if (!cf.has_table(ingest::kCfTweetsTable)) {
      throw Error(ErrorCode::kFailedPrecondition, "cf table 'tweets' is not loaded");
    }
    return influence_cf_engine(cf, options);
  }
  const char* table = options.engine == InfluenceEngine::kSqlInternal
                          ? ingest::kTweetsInternalTable
                          : ingest::kTweetsTable;
  if (!catalog.has_table(table)) {
    throw Error(ErrorCode::kFailedPrecondition, std::string("table '") + table + "' is not loaded");
  }
  return influence_sql_engine(catalog, options);
}

std::string influence_csv(const std::vector<InfluenceRow>& rows) {
  std::string out = "author_id,impressions,likes,quotes,replies,retweets,influence\n";
  for (const auto& r : rows) {
    out += csv::format_row({r.author_id, std::to_string(r.impressions), std::to_string(r.likes),
                            std::to_string(r.quotes), std::to_string(r.replies),
                            std::to_string(r.retweets), std::to_string(r.influence)});
  }
  return out;
}

std::string tweet_text(std::string_view json_line) {
  auto j = nlohmann::json::parse(json_line, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object()) return {};
  auto it = j.find("text");
  if (it == j.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

std::vector<TermRow> task_terms(const dfs::MiniDfs& dfs, const std::string& tweets_path,
                                const TermsOptions& o) {
  std::vector<std::pair<std::int64_t, std::string>> ranked;
  if (o.engine == TermsEngine::kMapReduce) {
    mapreduce::JobSpec spec;
    spec.inputs = {tweets_path};
    spec.mapper = [&o](std::string_view record) {
      return mapreduce::word_count_mapper(tweet_text(record), o.stopwords,
                                          o.extended_normalization);
    };
    spec.reducer = mapreduce::sum_reducer;
    spec.num_map_splits = o.splits;
    spec.num_reducers = o.reducers;
    spec.workers = o.workers;
    ranked = mapreduce::rank_counts(mapreduce::run_job(dfs, spec));
  } else {
    dataflow::Context ctx(o.workers);
    auto texts = ctx.from_text_file(dfs, tweets_path, o.splits).map([](const std::string& line) {
      return tweet_text(line);
    });
    ranked = dataflow::word_count(texts, o.stopwords, o.extended_normalization).collect();
  }
  std::vector<TermRow> rows;
  rows.reserve(ranked.size());
  for (auto& [count, term] : ranked) rows.push_back({std::move(term), count});
  return rows;
}

std::string terms_csv(const std::vector<TermRow>& rows) {
  std::string out = "term,count\n";
  for (const auto& r : rows) out += csv::format_row({r.term, std::to_string(r.count)});
  return out;
}

GraphReport task_graph(const tablestore::Catalog& catalog, std::string_view follows_csv,
                       const graph::BuildOptions& options) {
  auto rs = catalog.query("SELECT id, username FROM users");
  std::vector<graph::UserRow> users;
  users.reserve(rs.rows.size());
  for (const auto& r : rs.rows) {
    users.push_back({tablestore::to_display(r[0]), tablestore::to_display(r[1])});
  }
  auto g = graph::build_graph(users, graph::parse_follows_csv(follows_csv), options);
  GraphReport report;
  report.degrees = graph::degrees(g);
  report.components = graph::weak_components(g);
  report.edge_list = graph::export_graph(g, graph::ExportFormat::kEdgeList);
  report.stats = g.stats();
  report.vertex_count = g.vertex_count();
  report.edge_count = g.edge_count();
  std::set<std::string> comps;
  for (const auto& [v, c] : report.components) comps.insert(c);
  report.component_count = comps.size();
  return report;
}

std::string degrees_csv(const std::vector<graph::DegreeRow>& rows) {
  std::string out = "id,username,in_degree,out_degree\n";
  for (const auto& r : rows) {
    out += csv::format_row(
        {r.id, r.username, std::to_string(r.in_degree), std::to_string(r.out_degree)});
  }
  return out;
}

std::string components_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = "id,component\n";
  for (const auto& [v, c] : rows) out += csv::format_row({v, c});
  return out;
}

std::string write_report(dfs::MiniDfs& dfs, const std::string& run_id, const std::string& name,
                         std::string_view content) {
  const std::string path = "/reports/" + run_id + "/" + name;
  if (dfs.exists(path)) dfs.remove_file(path);
  dfs.put_file(path, content);
  return path;
}

}  // namespace miniplex::tasks
