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

// miniplex: one entrypoint for every module.
//
// Exit codes: 0 success, 1 usage error, 2 operation error. Data goes to
// stdout and diagnostics to stderr. Nothing under the root is touched until
// a command actually runs, so --help is free of side effects.

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "miniplex/bench/bench.h"
#include "miniplex/bench/generator.h"
#include "miniplex/bench/pipeline.h"
#include "miniplex/cfstore/cf_store.h"
#include "miniplex/common/error.h"
#include "miniplex/common/strings.h"
#include "miniplex/dataflow/word_count.h"
#include "miniplex/dfs/mini_dfs.h"
#include "miniplex/graph/graph.h"
#include "miniplex/ingest/ingest.h"
#include "miniplex/mapreduce/job.h"
#include "miniplex/mapreduce/word_count.h"
#include "miniplex/tablestore/catalog.h"
#include "miniplex/tasks/tasks.h"

namespace {

using namespace miniplex;

// A bad argument found after parsing; reported like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string root = "miniplex-data";
  int nodes = 3;
  std::uint64_t block_size = dfs::kDefaultBlockSize;
  int replication = dfs::kDefaultReplication;
  int workers = 1;
  std::string report_dir;
};

// Stores opened on first use.
class Env {
 public:
  explicit Env(const Settings& s) : s_(s) {}
  ~Env() {
    try {
      if (cf_) cf_->flush_all();
    } catch (const std::exception& e) {
      std::cerr << "warning: cf flush failed: " << e.what() << "\n";
    }
  }

  const Settings& settings() const { return s_; }

  dfs::MiniDfs& dfs() {
    if (!dfs_) {
      dfs_ = std::make_unique<dfs::MiniDfs>(
          s_.root, dfs::DfsOptions{s_.nodes, s_.block_size, s_.replication});
    }
    return *dfs_;
  }
  tablestore::Catalog& catalog() {
    if (!catalog_) {
      catalog_ = std::make_unique<tablestore::Catalog>(
          dfs(), std::filesystem::path(s_.root) / "meta" / "catalog.json");
    }
    return *catalog_;
  }
  cfstore::CfStore& cf() {
    if (!cf_) cf_ = std::make_unique<cfstore::CfStore>(dfs());
    return *cf_;
  }
  ingest::Ingestor& ingestor() {
    if (!ingestor_) ingestor_ = std::make_unique<ingest::Ingestor>(dfs());
    return *ingestor_;
  }

  // Preprocessed batch `id`, or the latest one.
  ingest::BatchManifest batch(const std::string& id) {
    auto chosen = id.empty() ? ingestor().latest_batch() : std::optional<std::string>(id);
    if (!chosen) throw Error(ErrorCode::kFailedPrecondition, "no batch has been landed");
    auto m = ingestor().manifest(*chosen);
    if (!m.preprocessed) {
      throw Error(ErrorCode::kFailedPrecondition, "batch " + *chosen + " is not preprocessed");
    }
    return m;
  }

  // Writes a report into the dfs and, with --report-dir, a local copy.
  std::string report(const std::string& run_id, const std::string& name,
                     const std::string& content) {
    auto path = tasks::write_report(dfs(), run_id, name, content);
    if (!s_.report_dir.empty()) {
      write_local_file(std::filesystem::path(s_.report_dir) / run_id / name, content);
    }
    std::cerr << "wrote " << path << "\n";
    return path;
  }

 private:
  Settings s_;
  std::unique_ptr<dfs::MiniDfs> dfs_;
  std::unique_ptr<tablestore::Catalog> catalog_;
  std::unique_ptr<cfstore::CfStore> cf_;
  std::unique_ptr<ingest::Ingestor> ingestor_;
};

using Action = std::function<void(Env&)>;

std::string default_run_id() {
  std::string id;
  for (char c : ingest::utc_now()) {
    if (c != '-' && c != ':') id += c;
  }
  return id;
}

dataflow::StopWords load_stopwords(const std::string& file) {
  return file.empty() ? dataflow::StopWords{} : dataflow::read_stopwords_file(file);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& part : split(text, ',')) {
    auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

// "id:text,public_metrics.like_count:int64" -> columns, dotted paths nesting
// into records.
tablestore::TableSchema schema_from_spec(const std::string& name, const std::string& spec) {
  tablestore::TableSchema schema;
  schema.name = name;
  for (const auto& item : split_list(spec)) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw UsageError("column '" + item + "' needs a :type");
    const std::string type = item.substr(colon + 1);
    tablestore::ColumnType t;
    if (type == "int64" || type == "int") {
      t = tablestore::ColumnType::kInt64;
    } else if (type == "text" || type == "string") {
      t = tablestore::ColumnType::kText;
    } else {
      throw UsageError("unknown column type '" + type + "'");
    }
    auto parts = split(item.substr(0, colon), '.');
    std::vector<tablestore::Column>* level = &schema.columns;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      auto it = std::find_if(level->begin(), level->end(),
                             [&](const tablestore::Column& c) { return c.name == parts[i]; });
      if (it == level->end()) {
        tablestore::Column c;
        c.name = parts[i];
        c.type = i + 1 < parts.size() ? tablestore::ColumnType::kRecord : t;
        level->push_back(c);
        it = level->end() - 1;
      }
      level = &it->fields;
    }
  }
  schema.validate();
  return schema;
}

void print_cells(const std::vector<cfstore::Cell>& cells) {
  for (const auto& c : cells) {
    std::cout << c.row_key << "\t" << c.family << ":" << c.qualifier << "\t"
              << escape_field(c.value) << "\n";
  }
}

void print_counts(const std::vector<std::pair<std::int64_t, std::string>>& ranked) {
  for (const auto& [count, term] : ranked) std::cout << count << "\t" << term << "\n";
}

std::vector<graph::UserRow> users_from(Env& env, const std::string& source) {
  if (source.empty() || source == "table") {
    auto rs = env.catalog().query("SELECT id, username FROM users");
    std::vector<graph::UserRow> users;
    for (const auto& r : rs.rows) {
      users.push_back({tablestore::to_display(r[0]), tablestore::to_display(r[1])});
    }
    return users;
  }
  return graph::parse_users_csv(read_local_file(source));
}

// ---- dfs ----

void add_dfs(CLI::App& app, Action& action) {
  auto* dfs = app.add_subcommand("dfs", "Replicated block storage");
  dfs->require_subcommand(1);

  auto* put = dfs->add_subcommand("put", "Copy a local file into the dfs");
  static std::string local, path;
  static std::uint64_t block_size = 0;
  static int replication = 0;
  put->add_option("local", local, "Local file")->required();
  put->add_option("path", path, "Dfs path")->required();
  put->add_option("--block-size", block_size, "Block size in bytes for this file");
  put->add_option("--replication", replication, "Replicas per block for this file");
  put->callback([&action] {
    action = [](Env& env) {
      auto meta = env.dfs().put_file(path, read_local_file(local), block_size, replication);
      std::cout << meta.path << "\t" << meta.total_length << "\t" << meta.blocks.size() << "\n";
    };
  });

  auto* get = dfs->add_subcommand("get", "Print a dfs file, or copy it to a local file");
  static std::string out;
  get->add_option("path", path, "Dfs path")->required();
  get->add_option("-o,--output", out, "Local file to write instead of stdout");
  get->callback([&action] {
    action = [](Env& env) {
      auto data = env.dfs().get_file(path);
      if (out.empty()) {
        std::cout << data;
      } else {
        write_local_file(out, data);
      }
    };
  });

  auto* ls = dfs->add_subcommand("ls", "List files: path, length, blocks, replication");
  static std::string prefix;
  ls->add_option("prefix", prefix, "Path prefix");
  ls->callback([&action] {
    action = [](Env& env) {
      for (const auto& f : env.dfs().list(prefix)) {
        std::cout << f.path << "\t" << f.total_length << "\t" << f.blocks.size() << "\t"
                  << f.replication << "\n";
      }
    };
  });

  auto* locate = dfs->add_subcommand("locate", "Blocks of a file and their replica nodes");
  locate->add_option("path", path, "Dfs path")->required();
  locate->callback([&action] {
    action = [](Env& env) {
      for (const auto& b : env.dfs().locate(path)) {
        std::string nodes;
        for (auto n : b.replicas) nodes += (nodes.empty() ? "" : ",") + std::to_string(n);
        std::cout << b.block_id << "\t" << b.index << "\t" << b.length << "\t" << nodes << "\n";
      }
    };
  });

  auto* rm = dfs->add_subcommand("rm", "Remove a file");
  rm->add_option("path", path, "Dfs path")->required();
  rm->callback([&action] { action = [](Env& env) { env.dfs().remove_file(path); }; });

  static int node = 0;
  auto* fail = dfs->add_subcommand("fail-node", "Mark a node unavailable");
  fail->add_option("node", node, "Node id")->required();
  fail->callback([&action] { action = [](Env& env) { env.dfs().fail_node(node); }; });
  auto* recover = dfs->add_subcommand("recover-node", "Bring a node back");
  recover->add_option("node", node, "Node id")->required();
  recover->callback([&action] { action = [](Env& env) { env.dfs().recover_node(node); }; });

  auto* nodes = dfs->add_subcommand("nodes", "Node availability");
  nodes->callback([&action] {
    action = [](Env& env) {
      for (const auto& n : env.dfs().nodes()) {
        std::cout << n.id << "\t" << (n.available ? "up" : "down") << "\n";
      }
    };
  });
}

// ---- ingest ----

void add_ingest(CLI::App& app, Action& action) {
  auto* ingest = app.add_subcommand("ingest", "Landing zone, preprocessing and loading");
  ingest->require_subcommand(1);
  static std::string file, batch, targets = "all";
  static bool keep = false;

  auto* land = ingest->add_subcommand("land", "Copy a JSON Lines file into a new batch");
  land->add_option("file", file, "Local JSON Lines file")->required();
  land->callback([&action] {
    action = [](Env& env) {
      auto m = env.ingestor().land(file);
      std::cout << m.batch_id << "\t" << m.raw_path << "\t" << m.raw_bytes << "\n";
    };
  });

  auto* pre = ingest->add_subcommand("preprocess", "Validate, deduplicate and normalize a batch");
  pre->add_option("batch", batch, "Batch id")->required();
  pre->callback([&action] {
    action = [](Env& env) {
      auto s = env.ingestor().preprocess(batch).stats;
      std::cout << "read=" << s.read << " malformed=" << s.malformed
                << " duplicates=" << s.duplicates << " tweets=" << s.emitted_tweets
                << " users=" << s.emitted_users << "\n";
    };
  });

  auto* load = ingest->add_subcommand("load", "Load a preprocessed batch into the stores");
  load->add_option("batch", batch, "Batch id (default: latest)");
  load->add_option("--targets", targets,
                   "all, or a list of tablestore-external,tablestore-internal,cfstore");
  load->add_flag("--keep-existing", keep, "Fail instead of replacing earlier tables");
  load->callback([&action] {
    ingest::LoadOptions opts;
    opts.replace_existing = !keep;
    if (targets != "all") {
      opts.targets.clear();
      for (const auto& t : split_list(targets)) {
        auto parsed = ingest::parse_target(t);
        if (!parsed) throw UsageError("unknown target '" + t + "'");
        opts.targets.insert(*parsed);
      }
    }
    action = [opts](Env& env) {
      auto r = ingest::load_all(env.dfs(), env.catalog(), env.cf(), env.batch(batch), opts);
      for (const auto& [t, n] : r.tweet_counts) {
        std::cout << ingest::target_name(t) << "\t" << n << "\n";
      }
      std::cout << "users\t" << r.users << "\n";
    };
  });

  auto* list = ingest->add_subcommand("batches", "List batches");
  list->callback([&action] {
    action = [](Env& env) {
      for (const auto& id : env.ingestor().batches()) {
        auto m = env.ingestor().manifest(id);
        std::cout << id << "\t" << (m.preprocessed ? "preprocessed" : "landed") << "\t"
                  << m.stats.emitted_tweets << "\n";
      }
    };
  });
}

// ---- table / sql ----

void add_table(CLI::App& app, Action& action) {
  auto* table = app.add_subcommand("table", "External and internal tables");
  table->require_subcommand(1);
  static std::string name, source, format = "jsonl", preset, schema_file, columns, from;

  auto* ext = table->add_subcommand("create-external", "Schema-on-read table over a dfs file");
  ext->add_option("name", name, "Table name")->required();
  ext->add_option("--source", source, "Dfs file")->required();
  ext->add_option("--format", format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
  auto* p = ext->add_option("--preset", preset, "tweets or users")
                ->check(CLI::IsMember({"tweets", "users"}));
  auto* s = ext->add_option("--schema", schema_file, "Local schema JSON file");
  auto* c = ext->add_option("--columns", columns, "name:type list, e.g. id:text,pm.likes:int64");
  p->excludes(s)->excludes(c);
  s->excludes(c);
  ext->callback([&action] {
    tablestore::TableSchema schema;
    if (preset == "tweets") {
      schema = ingest::tweets_schema(name);
    } else if (preset == "users") {
      schema = ingest::users_schema(name);
    } else if (!columns.empty()) {
      schema = schema_from_spec(name, columns);
    } else if (schema_file.empty()) {
      throw UsageError("one of --preset, --schema or --columns is required");
    }
    auto fmt = *tablestore::parse_source_format(format);
    action = [schema, fmt](Env& env) {
      auto sc = schema;
      if (!schema_file.empty()) {
        sc = tablestore::schema_from_json(nlohmann::json::parse(read_local_file(schema_file)));
        sc.name = name;
      }
      env.catalog().create_external_table(sc, source, fmt);
    };
  });

  auto* mat = table->add_subcommand("materialize", "Internal table copied from another table");
  mat->add_option("name", name, "New table")->required();
  mat->add_option("--from", from, "Source table")->required();
  mat->callback([&action] {
    action = [](Env& env) {
      auto info = env.catalog().create_internal_table_as(name, from);
      std::cout << name << "\t" << info.row_count.value_or(0) << "\n";
    };
  });

  auto* drop = table->add_subcommand("drop", "Drop a table");
  drop->add_option("name", name, "Table name")->required();
  drop->callback([&action] { action = [](Env& env) { env.catalog().drop_table(name); }; });

  auto* list = table->add_subcommand("list", "Tables with kind and source");
  list->callback([&action] {
    action = [](Env& env) {
      for (const auto& t : env.catalog().table_names()) {
        auto info = env.catalog().describe(t);
        std::cout << t << "\t"
                  << (info.kind == tablestore::TableKind::kExternal ? "external" : "internal")
                  << "\t" << info.source << "\n";
      }
    };
  });

  auto* desc = table->add_subcommand("describe", "Leaf columns of a table");
  desc->add_option("name", name, "Table name")->required();
  desc->callback([&action] {
    action = [](Env& env) {
      for (const auto& leaf : env.catalog().describe(name).schema.leaves()) {
        std::cout << leaf.path << "\t" << tablestore::column_type_name(leaf.type) << "\n";
      }
    };
  });
}

void add_sql(CLI::App& app, Action& action) {
  static std::string query, scope, scope_column = "text";
  auto* sql = app.add_subcommand("sql", "Run a query; CSV on stdout");
  sql->add_option("query", query, "SELECT ... FROM ... [GROUP BY ...] [ORDER BY ...] [LIMIT n]")
      ->required();
  sql->add_option("--scope", scope, "Keep rows whose scope column contains this keyword");
  sql->add_option("--scope-column", scope_column, "Text column for --scope");
  sql->callback([&action] {
    action = [](Env& env) {
      tablestore::QueryOptions opts;
      if (!scope.empty()) opts.scope = tablestore::RowScope{scope_column, scope};
      std::cout << env.catalog().query(query, opts).to_csv();
    };
  });
}

// ---- cf ----

void add_cf(CLI::App& app, Action& action) {
  auto* cf = app.add_subcommand("cf", "Column-family store");
  cf->require_subcommand(1);
  static std::string table, families = "m,t", row, column, value, family, start, end,
                            qualifiers, batch, input;

  auto* create = cf->add_subcommand("create", "Create a table");
  create->add_option("table", table, "Table name")->required();
  create->add_option("--families", families, "Comma-separated column families");
  create->callback([&action] {
    action = [](Env& env) {
      auto list = split_list(families);
      env.cf().create_table(table, {list.begin(), list.end()});
    };
  });

  auto* drop = cf->add_subcommand("drop", "Drop a table");
  drop->add_option("table", table, "Table name")->required();
  drop->callback([&action] { action = [](Env& env) { env.cf().drop_table(table); }; });

  auto* list = cf->add_subcommand("list", "Tables and their families");
  list->callback([&action] {
    action = [](Env& env) {
      for (const auto& t : env.cf().table_names()) {
        std::string fams;
        for (const auto& f : env.cf().families(t)) fams += (fams.empty() ? "" : ",") + f;
        std::cout << t << "\t" << fams << "\n";
      }
    };
  });

  auto* put = cf->add_subcommand("put", "Write one cell");
  put->add_option("table", table, "Table")->required();
  put->add_option("row", row, "Row key")->required();
  put->add_option("column", column, "family:qualifier")->required();
  put->add_option("value", value, "Value")->required();
  put->callback([&action] {
    const auto colon = column.find(':');
    if (colon == std::string::npos) throw UsageError("column must be family:qualifier");
    action = [colon](Env& env) {
      env.cf().put(table, row, column.substr(0, colon), column.substr(colon + 1), value);
    };
  });

  auto* get = cf->add_subcommand("get", "Cells of one row");
  get->add_option("table", table, "Table")->required();
  get->add_option("row", row, "Row key")->required();
  get->callback([&action] { action = [](Env& env) { print_cells(env.cf().get(table, row)); }; });

  auto* scan = cf->add_subcommand("scan", "Rows in key order: row, family:qualifier, value");
  scan->add_option("table", table, "Table")->required();
  scan->add_option("--family", family, "Only this family");
  scan->add_option("--qualifiers", qualifiers, "Only these qualifiers, comma-separated");
  scan->add_option("--start", start, "First row key (inclusive)");
  scan->add_option("--end", end, "Last row key (exclusive)");
  scan->callback([&action] {
    action = [](Env& env) {
      cfstore::ScanOptions o;
      o.family = family;
      if (!qualifiers.empty()) {
        auto q = split_list(qualifiers);
        o.qualifiers = std::set<std::string>(q.begin(), q.end());
      }
      if (!start.empty()) o.start_row = start;
      if (!end.empty()) o.end_row = end;
      auto scanner = env.cf().scan(table, o);
      cfstore::ScanRow r;
      while (scanner.next(r)) print_cells(r.cells);
    };
  });

  auto* load = cf->add_subcommand("load-tweets", "Load preprocessed tweets, one row per id");
  load->add_option("table", table, "Table (created with families m,t when absent)")->required();
  auto* b = load->add_option("--batch", batch, "Batch id (default: latest)");
  load->add_option("--input", input, "Dfs JSON Lines file instead of a batch")->excludes(b);
  load->callback([&action] {
    action = [](Env& env) {
      const std::string path = input.empty() ? env.batch(batch).tweets_path : input;
      if (!env.cf().has_table(table)) env.cf().create_table(table, {"m", "t"});
      auto s = env.cf().load_tweets(table, env.dfs().get_file(path));
      env.cf().flush(table);
      std::cout << "loaded=" << s.loaded << " duplicates=" << s.duplicates
                << " malformed=" << s.malformed << "\n";
    };
  });
}

// ---- mr / flow ----

void add_engines(CLI::App& app, Action& action) {
  static std::string input, stopwords, spill = "mem", spill_dir;
  static int splits = 4, reducers = 4, partitions = 4;
  static bool tweets = false, extended = false;

  auto* mr = app.add_subcommand("mr", "MapReduce engine");
  mr->require_subcommand(1);
  auto* mwc = mr->add_subcommand("wordcount", "Term counts as count<TAB>term, descending");
  mwc->add_option("--input", input, "Dfs text file")->required();
  mwc->add_option("--stopwords", stopwords, "Local stopword file, one per line");
  mwc->add_option("--splits", splits, "Map splits")->check(CLI::PositiveNumber);
  mwc->add_option("--reducers", reducers, "Reducers")->check(CLI::PositiveNumber);
  mwc->add_option("--spill", spill, "mem or disk")->check(CLI::IsMember({"mem", "disk"}));
  mwc->add_option("--spill-dir", spill_dir, "Directory for disk spills");
  mwc->add_flag("--tweets", tweets, "Input is tweet JSON Lines; count the text field");
  mwc->add_flag("--extended-normalization", extended, "Also strip other punctuation");
  mwc->callback([&action] {
    action = [](Env& env) {
      auto stop = load_stopwords(stopwords);
      mapreduce::JobSpec spec;
      spec.inputs = {input};
      spec.mapper = [stop](std::string_view record) {
        return mapreduce::word_count_mapper(tweets ? tasks::tweet_text(record)
                                                   : std::string(record),
                                            stop, extended);
      };
      spec.reducer = mapreduce::sum_reducer;
      spec.num_map_splits = splits;
      spec.num_reducers = reducers;
      spec.workers = env.settings().workers;
      spec.spill_mode =
          spill == "disk" ? mapreduce::SpillMode::kOnDisk : mapreduce::SpillMode::kInMemory;
      spec.spill_dir = spill_dir;
      auto result = mapreduce::run_job(env.dfs(), spec);
      print_counts(mapreduce::rank_counts(result));
      const auto& c = result.counters;
      std::cerr << "map_input_records=" << c.map_input_records
                << " map_output_records=" << c.map_output_records
                << " reduce_input_groups=" << c.reduce_input_groups
                << " spill_files=" << c.spill_files << " spill_bytes=" << c.spill_bytes << "\n";
    };
  });

  auto* flow = app.add_subcommand("flow", "In-memory dataflow engine");
  flow->require_subcommand(1);
  auto* fwc = flow->add_subcommand("wordcount", "Term counts as count<TAB>term, descending");
  fwc->add_option("--input", input, "Dfs text file")->required();
  fwc->add_option("--stopwords", stopwords, "Local stopword file, one per line");
  fwc->add_option("--partitions", partitions, "Partitions")->check(CLI::PositiveNumber);
  fwc->add_flag("--tweets", tweets, "Input is tweet JSON Lines; count the text field");
  fwc->add_flag("--extended-normalization", extended, "Also strip other punctuation");
  fwc->callback([&action] {
    action = [](Env& env) {
      dataflow::Context ctx(env.settings().workers);
      auto lines = ctx.from_text_file(env.dfs(), input, partitions);
      if (tweets) lines = lines.map([](const std::string& l) { return tasks::tweet_text(l); });
      print_counts(dataflow::word_count(lines, load_stopwords(stopwords), extended).collect());
    };
  });
}

// ---- graph ----

void add_graph(CLI::App& app, Action& action) {
  auto* g = app.add_subcommand("graph", "Follower graph");
  g->require_subcommand(1);
  static std::string users, follows, format = "edge-list";
  static bool strict = false;

  auto common = [](CLI::App* sub) {
    sub->add_option("--users", users, "'table' (the users table) or a local id,username CSV");
    sub->add_option("--follows", follows, "Local src,dst CSV")->required();
    sub->add_flag("--strict", strict, "Reject edges to unknown users");
  };
  auto build = [](Env& env) {
    return graph::build_graph(users_from(env, users),
                              graph::parse_follows_csv(read_local_file(follows)),
                              {strict, false});
  };

  auto* b = g->add_subcommand("build", "Build and print vertex and edge counts");
  common(b);
  b->callback([&action, build] {
    action = [build](Env& env) {
      auto pg = build(env);
      const auto& s = pg.stats();
      std::cout << "vertices=" << pg.vertex_count() << " edges=" << pg.edge_count()
                << " implicit_vertices=" << s.implicit_vertices
                << " duplicate_edges=" << s.duplicate_edges
                << " self_loops_dropped=" << s.self_loops_dropped << "\n";
    };
  });
  auto* d = g->add_subcommand("degrees", "id,username,in_degree,out_degree");
  common(d);
  d->callback([&action, build] {
    action = [build](Env& env) { std::cout << tasks::degrees_csv(graph::degrees(build(env))); };
  });
  auto* c = g->add_subcommand("components", "id,component (weak components)");
  common(c);
  c->callback([&action, build] {
    action = [build](Env& env) {
      std::cout << tasks::components_csv(graph::weak_components(build(env)));
    };
  });
  auto* e = g->add_subcommand("export", "Edge list or DOT");
  common(e);
  e->add_option("--format", format, "edge-list or dot")
      ->check(CLI::IsMember({"edge-list", "edgelist", "csv", "dot"}));
  e->callback([&action, build] {
    action = [build](Env& env) {
      std::cout << graph::export_graph(build(env), *graph::parse_export_format(format));
    };
  });
}

// ---- task ----

void add_task(CLI::App& app, Action& action) {
  auto* task = app.add_subcommand("task", "The three analytic tasks; reports under /reports");
  task->require_subcommand(1);
  static std::string influence_engine = "sql-external", terms_engine = "flow", formula = "prose",
                     scope, stopwords, batch, follows, run_id;
  static bool strict = false;

  auto* inf = task->add_subcommand("influence", "Per-author engagement ranking");
  inf->add_option("--engine", influence_engine, "sql-external, sql-internal or cf-scan")
      ->check(CLI::IsMember({"sql-external", "sql-internal", "cf-scan"}))
      ->capture_default_str();
  inf->add_option("--formula", formula, "prose or verbatim")
      ->check(CLI::IsMember({"prose", "verbatim"}));
  inf->add_option("--scope", scope, "Only tweets whose text contains this keyword");
  inf->add_option("--run-id", run_id, "Report directory name (default: a UTC timestamp)");
  inf->callback([&action] {
    action = [](Env& env) {
      tasks::InfluenceOptions o{*tasks::parse_influence_engine(influence_engine),
                                *tasks::parse_formula(formula), std::nullopt};
      if (!scope.empty()) o.scope = scope;
      auto csv = tasks::influence_csv(tasks::task_influence(env.catalog(), env.cf(), o));
      std::cout << csv;
      env.report(run_id.empty() ? default_run_id() : run_id,
                 "influence_" + influence_engine + "_" + formula + ".csv", csv);
    };
  });

  auto* terms = task->add_subcommand("terms", "Dominant terms in tweet text");
  terms->add_option("--engine", terms_engine, "mr or flow")
      ->check(CLI::IsMember({"mr", "mapreduce", "flow", "dataflow"}))
      ->capture_default_str();
  terms->add_option("--stopwords", stopwords, "Local stopword file, one per line");
  terms->add_option("--batch", batch, "Batch id (default: latest)");
  terms->add_option("--run-id", run_id, "Report directory name (default: a UTC timestamp)");
  terms->callback([&action] {
    action = [](Env& env) {
      tasks::TermsOptions o;
      o.engine = *tasks::parse_terms_engine(terms_engine);
      o.stopwords = load_stopwords(stopwords);
      o.workers = env.settings().workers;
      auto csv = tasks::terms_csv(tasks::task_terms(env.dfs(), env.batch(batch).tweets_path, o));
      std::cout << csv;
      env.report(run_id.empty() ? default_run_id() : run_id,
                 "terms_" + std::string(tasks::engine_name(o.engine)) + ".csv", csv);
    };
  });

  auto* gr = task->add_subcommand("graph", "Follower degrees and weak components");
  gr->add_option("--follows", follows, "Local src,dst CSV")->required();
  gr->add_flag("--strict", strict, "Reject edges to unknown users");
  gr->add_option("--run-id", run_id, "Report directory name (default: a UTC timestamp)");
  gr->callback([&action] {
    action = [](Env& env) {
      auto r = tasks::task_graph(env.catalog(), read_local_file(follows), {strict, false});
      const std::string id = run_id.empty() ? default_run_id() : run_id;
      env.report(id, "graph_degrees.csv", tasks::degrees_csv(r.degrees));
      env.report(id, "graph_components.csv", tasks::components_csv(r.components));
      env.report(id, "graph_edges.csv", r.edge_list);
      std::cout << "vertices=" << r.vertex_count << " edges=" << r.edge_count
                << " components=" << r.component_count << "\n";
    };
  });
}

// ---- bench ----

void add_bench(CLI::App& app, Action& action) {
  auto* bench = app.add_subcommand("bench", "Synthetic data and timed runs");
  bench->require_subcommand(1);
  static bench::GenSpec spec;
  static std::string out_dir = "dataset", topic, matrix = "all", dataset = "default", follows,
                     formula = "prose", stopwords, batch, run_id, e2e_run_id = "e2e",
                     format = "csv";
  static int reps = bench::kDefaultRepetitions;

  auto gen_options = [](CLI::App* sub) {
    sub->add_option("--tweets", spec.n_tweets, "Number of tweets")->capture_default_str();
    sub->add_option("--users", spec.n_users, "Number of users")->capture_default_str();
    sub->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    sub->add_option("--vocab", spec.vocab_size, "Vocabulary size")->capture_default_str();
    sub->add_option("--zipf", spec.zipf_s, "Zipf exponent of term frequencies")
        ->capture_default_str();
    sub->add_option("--follow-density", spec.follow_density,
                    "Probability of each ordered follow pair")
        ->capture_default_str();
    sub->add_option("--topic", topic, "Keyword mentioned by a share of tweets");
    sub->add_option("--topic-rate", spec.topic_rate, "Share of tweets with the topic")
        ->capture_default_str();
  };

  auto* gen = bench->add_subcommand("gen", "Write tweets.jsonl, users.jsonl, follows.csv");
  gen_options(gen);
  gen->add_option("--out", out_dir, "Output directory")->capture_default_str();
  gen->callback([&action] {
    if (!topic.empty()) spec.topic = topic;
    action = [](Env&) {
      auto m = bench::generate(spec, out_dir);
      std::cout << "tweets=" << m.tweets << " users=" << m.users << " follows=" << m.follows
                << " dir=" << out_dir << "\n";
    };
  });

  auto* run = bench->add_subcommand("run", "Cross-check engines, then time each cell");
  run->add_option("--matrix", matrix, "all, or a list of task[:engine]")->capture_default_str();
  run->add_option("--reps", reps, "Timed repetitions per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--dataset", dataset, "Dataset label")->capture_default_str();
  run->add_option("--follows", follows, "Local follows CSV; enables the graph task");
  run->add_option("--formula", formula, "prose or verbatim")
      ->check(CLI::IsMember({"prose", "verbatim"}));
  run->add_option("--stopwords", stopwords, "Local stopword file for the terms task");
  run->add_option("--batch", batch, "Batch id (default: latest)");
  run->add_option("--run-id", run_id, "Report directory name (default: a UTC timestamp)");
  run->callback([&action] {
    action = [](Env& env) {
      bench::MatrixOptions mo;
      mo.matrix = split_list(matrix);
      mo.formula = *tasks::parse_formula(formula);
      mo.terms.stopwords = load_stopwords(stopwords);
      mo.terms.workers = env.settings().workers;
      mo.tweets_path = env.batch(batch).tweets_path;
      if (!follows.empty()) mo.follows_csv = read_local_file(follows);
      bench::BenchOptions bo;
      bo.dataset = dataset;
      bo.repetitions = reps;
      auto report =
          bench::run_bench(bench::make_cells(env.dfs(), env.catalog(), env.cf(), mo), bo);
      const std::string dir = "bench/" + (run_id.empty() ? default_run_id() : run_id);
      env.report(dir, "results.json", bench::report_json(report));
      for (auto f : {bench::ReportFormat::kCsv, bench::ReportFormat::kMarkdown,
                     bench::ReportFormat::kSvg}) {
        env.report(dir, "bench." + std::string(bench::report_extension(f)),
                   bench::render_report(report, f));
      }
      std::cout << bench::render_report(report, bench::ReportFormat::kCsv);
    };
  });

  auto* rep = bench->add_subcommand("report", "Render a stored bench run");
  rep->add_option("--format", format, "csv, md or svg")
      ->check(CLI::IsMember({"csv", "md", "markdown", "svg", "svg-bars"}))
      ->capture_default_str();
  rep->add_option("--run-id", run_id, "Bench run (default: the latest)");
  rep->callback([&action] {
    action = [](Env& env) {
      std::string id = run_id;
      if (id.empty()) {
        for (const auto& f : env.dfs().list("/reports/bench/")) {
          auto rest = f.path.substr(std::string("/reports/bench/").size());
          auto slash = rest.find('/');
          if (slash != std::string::npos && rest.substr(slash) == "/results.json") {
            id = std::max(id, rest.substr(0, slash));
          }
        }
        if (id.empty()) throw Error(ErrorCode::kNotFound, "no bench run found");
      }
      auto report = bench::parse_report_json(
          env.dfs().get_file("/reports/bench/" + id + "/results.json"));
      auto f = *bench::parse_report_format(format);
      auto text = bench::render_report(report, f);
      env.report("bench/" + id, "bench." + std::string(bench::report_extension(f)), text);
      std::cout << text;
    };
  });

  auto* e2e = bench->add_subcommand(
      "e2e", "Generate, ingest, load, run every task and bench; print report hashes");
  gen_options(e2e);
  e2e->add_option("--reps", reps, "Timed repetitions per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  e2e->add_option("--dataset", dataset, "Dataset label")->capture_default_str();
  e2e->add_option("--run-id", e2e_run_id, "Report directory name")->capture_default_str();
  e2e->callback([&action] {
    if (!topic.empty()) spec.topic = topic;
    action = [](Env& env) {
      bench::EndToEndOptions o;
      o.spec = spec;
      o.run_id = e2e_run_id;
      o.dataset = dataset;
      o.repetitions = reps;
      o.workers = env.settings().workers;
      auto r = bench::run_end_to_end(env.dfs(), env.catalog(), env.cf(), o);
      if (!env.settings().report_dir.empty()) {
        for (const auto& p : r.report_paths) {
          write_local_file(std::filesystem::path(env.settings().report_dir) /
                               p.substr(std::string("/reports/").size()),
                           env.dfs().get_file(p));
        }
      }
      std::cout << bench::report_digest(env.dfs(), r.report_paths);
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"miniplex: replicated storage, batch and dataflow engines, SQL and "
               "column-family stores, graph analytics, and a benchmark harness"};
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file of key = value lines (root, nodes, workers, ...)");

  Settings settings;
  app.add_option("--root", settings.root, "Data directory; MINIPLEX_ROOT overrides the config file")
      ->capture_default_str();
  app.add_option("--nodes", settings.nodes, "Storage nodes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--block-size", settings.block_size, "Default dfs block size in bytes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--replication", settings.replication, "Default replicas per block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--workers", settings.workers, "Worker threads for the engines")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--report-dir", settings.report_dir, "Also copy reports to this local directory");

  Action action;
  add_dfs(app, action);
  add_ingest(app, action);
  add_table(app, action);
  add_sql(app, action);
  add_cf(app, action);
  add_engines(app, action);
  add_graph(app, action);
  add_task(app, action);
  add_bench(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }
  if (!action) {
    std::cerr << app.help();
    return 1;
  }
  // Precedence for the root: flag, then MINIPLEX_ROOT, then config file.
  if (const char* env_root = std::getenv("MINIPLEX_ROOT"); env_root && *env_root) {
    bool on_command_line = false;
    for (int i = 1; i < argc; ++i) {
      const std::string_view arg = argv[i];
      if (arg == "--root" || arg.substr(0, 7) == "--root=") on_command_line = true;
    }
    if (!on_command_line) settings.root = env_root;
  }
  try {
    Env env(settings);
    action(env);
  } catch (const Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
