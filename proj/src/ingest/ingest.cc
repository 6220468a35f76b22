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

#include "miniplex/ingest/ingest.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "miniplex/cfstore/cf_store.h"
#include "miniplex/common/error.h"
#include "miniplex/common/hash.h"
#include "miniplex/common/strings.h"
#include "miniplex/dfs/mini_dfs.h"
#include "miniplex/tablestore/catalog.h"

namespace miniplex::ingest {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kCounters[] = {"impression_count", "like_count", "quote_count",
                                     "reply_count", "retweet_count"};

std::string landing_dir(const std::string& batch) { return "/landing/" + batch + "/"; }
std::string manifest_path(const std::string& batch) { return landing_dir(batch) + "manifest.json"; }

std::optional<std::string> id_field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) return std::nullopt;
  if (it->is_string()) {
    const auto& s = it->get_ref<const std::string&>();
    if (s.empty()) return std::nullopt;
    return s;
  }
  if (it->is_number_integer()) return it->dump();
  return std::nullopt;
}

// Absent/null -> 0; nullopt means the value cannot be a counter.
std::optional<std::int64_t> counter(const json* v) {
  if (!v || v->is_null()) return 0;
  std::optional<std::int64_t> n;
  if (v->is_number_unsigned()) {
    if (v->get<std::uint64_t>() <= static_cast<std::uint64_t>(INT64_MAX)) {
      n = static_cast<std::int64_t>(v->get<std::uint64_t>());
    }
  } else if (v->is_number_integer()) {
    n = v->get<std::int64_t>();
  } else if (v->is_number_float()) {
    double d = v->get<double>();
    if (d >= 0 && d < 9.2e18 && static_cast<double>(static_cast<std::int64_t>(d)) == d) {
      n = static_cast<std::int64_t>(d);
    }
  } else if (v->is_string()) {
    n = parse_int64(v->get_ref<const std::string&>());
  }
  if (!n || *n < 0) return std::nullopt;
  return n;
}

std::optional<std::string> optional_text(const json& obj, const char* name, bool& bad) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    bad = true;
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::optional<std::string> username_of(const json& obj) {
  auto it = obj.find("username");
  if (it != obj.end() && it->is_string() && !it->get_ref<const std::string&>().empty()) {
    return it->get<std::string>();
  }
  auto author = obj.find("author");
  if (author != obj.end() && author->is_object()) {
    auto u = author->find("username");
    if (u != author->end() && u->is_string() && !u->get_ref<const std::string&>().empty()) {
      return u->get<std::string>();
    }
  }
  return std::nullopt;
}

ordered_json manifest_to_json(const BatchManifest& m) {
  const auto& s = m.stats;
  return ordered_json{{"batch_id", m.batch_id},
                      {"landed_at", m.landed_at},
                      {"raw_path", m.raw_path},
                      {"raw_bytes", m.raw_bytes},
                      {"raw_checksum", m.raw_checksum},
                      {"preprocessed", m.preprocessed},
                      {"preprocessed_at", m.preprocessed_at},
                      {"tweets_path", m.tweets_path},
                      {"users_path", m.users_path},
                      {"stats",
                       ordered_json{{"read", s.read},
                                    {"malformed", s.malformed},
                                    {"duplicates", s.duplicates},
                                    {"emitted_tweets", s.emitted_tweets},
                                    {"emitted_users", s.emitted_users}}}};
}

BatchManifest manifest_from_json(const json& j) {
  BatchManifest m;
  m.batch_id = j.at("batch_id");
  m.landed_at = j.at("landed_at");
  m.raw_path = j.at("raw_path");
  m.raw_bytes = j.at("raw_bytes");
  m.raw_checksum = j.at("raw_checksum");
  m.preprocessed = j.at("preprocessed");
  m.preprocessed_at = j.at("preprocessed_at");
  m.tweets_path = j.at("tweets_path");
  m.users_path = j.at("users_path");
  const auto& s = j.at("stats");
  m.stats = {s.at("read"), s.at("malformed"), s.at("duplicates"), s.at("emitted_tweets"),
             s.at("emitted_users")};
  return m;
}

void replace_file(dfs::MiniDfs& dfs, const std::string& path, std::string_view content) {
  if (dfs.exists(path)) dfs.remove_file(path);
  dfs.put_file(path, content);
}

}  // namespace

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

PreprocessOutput preprocess_records(std::string_view raw, const std::string& batch_id,
                                    const std::string& ingested_at) {
  PreprocessOutput out;
  std::unordered_set<std::string> seen;
  std::map<std::string, std::optional<std::string>> authors;
  for (const auto& line : split_lines(raw)) {
    if (trim(line).empty()) continue;
    ++out.stats.read;
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!obj.is_object()) {
      ++out.stats.malformed;
      continue;
    }
    auto id = id_field(obj, "id");
    auto author = id_field(obj, "author_id");
    bool bad = !id || !author;
    auto text = optional_text(obj, "text", bad);
    auto created = optional_text(obj, "created_at", bad);
    std::int64_t counters[5] = {};
    auto pm = obj.find("public_metrics");
    if (pm != obj.end() && !pm->is_null() && !pm->is_object()) bad = true;
    for (int i = 0; i < 5 && !bad; ++i) {
      const json* v = nullptr;
      if (pm != obj.end() && pm->is_object()) {
        auto f = pm->find(kCounters[i]);
        if (f != pm->end()) v = &*f;
      }
      auto c = counter(v);
      if (!c) {
        bad = true;
      } else {
        counters[i] = *c;
      }
    }
    if (bad) {
      ++out.stats.malformed;
      continue;
    }
    if (!seen.insert(*id).second) {
      ++out.stats.duplicates;
      continue;
    }

    ordered_json rec;
    rec["id"] = *id;
    rec["author_id"] = *author;
    rec["text"] = text.value_or("");
    rec["created_at"] = created.value_or("");
    ordered_json metrics;
    for (int i = 0; i < 5; ++i) metrics[kCounters[i]] = counters[i];
    rec["public_metrics"] = std::move(metrics);
    auto username = username_of(obj);
    if (username) rec["username"] = *username;
    bool keep = false;
    auto b = optional_text(obj, "batch_id", keep);
    auto at = optional_text(obj, "ingested_at", keep);
    rec["batch_id"] = b.value_or(batch_id);
    rec["ingested_at"] = at.value_or(ingested_at);
    out.tweets_jsonl += rec.dump() + "\n";
    ++out.stats.emitted_tweets;

    auto& known = authors[*author];
    if (!known && username) known = username;
  }
  for (const auto& [id, name] : authors) {
    ordered_json u;
    u["id"] = id;
    u["username"] = name.value_or("user_" + id);
    out.users_jsonl += u.dump() + "\n";
  }
  out.stats.emitted_users = static_cast<std::int64_t>(authors.size());
  return out;
}

Ingestor::Ingestor(dfs::MiniDfs& dfs, Clock clock) : dfs_(dfs), clock_(std::move(clock)) {}

std::vector<std::string> Ingestor::batches() const {
  std::vector<std::string> out;
  for (const auto& f : dfs_.list("/landing/")) {
    const std::string& p = f.path;
    if (!std::string_view(p).ends_with("/manifest.json")) continue;
    out.push_back(p.substr(9, p.size() - 9 - 14));
  }
  return out;
}

std::optional<std::string> Ingestor::latest_batch() const {
  auto all = batches();
  if (all.empty()) return std::nullopt;
  return all.back();
}

BatchManifest Ingestor::manifest(const std::string& batch_id) const {
  const std::string path = manifest_path(batch_id);
  if (!dfs_.exists(path)) throw Error(ErrorCode::kNotFound, "batch not found: " + batch_id);
  return manifest_from_json(json::parse(dfs_.get_file(path)));
}

void Ingestor::write_manifest(const BatchManifest& m) {
  replace_file(dfs_, manifest_path(m.batch_id), manifest_to_json(m).dump(2) + "\n");
}

BatchManifest Ingestor::land(const std::filesystem::path& local_file) {
  std::string content;
  try {
    content = read_local_file(local_file);
  } catch (const Error&) {
    throw Error(ErrorCode::kNotFound, "cannot read ingest source " + local_file.string());
  }
  return land_bytes(content);
}

BatchManifest Ingestor::land_bytes(std::string_view content) {
  std::lock_guard lock(mu_);
  int next = 1;
  for (const auto& b : batches()) {
    if (b.size() == 7 && b[0] == 'b') {
      if (auto n = parse_int64(b.substr(1))) next = std::max<int>(next, static_cast<int>(*n) + 1);
    }
  }
  BatchManifest m;
  for (;; ++next) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "b%06d", next);
    m.batch_id = buf;
    m.raw_path = landing_dir(m.batch_id) + "raw.jsonl";
    if (dfs_.exists(m.raw_path)) continue;
    try {
      dfs_.put_file(m.raw_path, content);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAlreadyExists) throw;
    }
  }
  m.landed_at = clock_();
  m.raw_bytes = content.size();
  m.raw_checksum = hex64(fnv1a64(content));
  write_manifest(m);
  return m;
}

BatchManifest Ingestor::preprocess(const std::string& batch_id) {
  std::lock_guard lock(mu_);
  BatchManifest m = manifest(batch_id);
  if (!dfs_.exists(m.raw_path)) {
    throw Error(ErrorCode::kNotFound, "raw data missing for batch " + batch_id);
  }
  const std::string raw = dfs_.get_file(m.raw_path);
  if (hex64(fnv1a64(raw)) != m.raw_checksum) {
    throw Error(ErrorCode::kCorruption, "raw data of batch " + batch_id + " changed since landing");
  }
  m.preprocessed_at = clock_();
  auto out = preprocess_records(raw, batch_id, m.preprocessed_at);
  m.tweets_path = "/data/" + batch_id + "/tweets.jsonl";
  m.users_path = "/data/" + batch_id + "/users.jsonl";
  replace_file(dfs_, m.tweets_path, out.tweets_jsonl);
  replace_file(dfs_, m.users_path, out.users_jsonl);
  m.stats = out.stats;
  m.preprocessed = true;
  write_manifest(m);
  return m;
}

std::optional<Target> parse_target(std::string_view name) {
  if (name == "tablestore-external" || name == "external") return Target::kTableExternal;
  if (name == "tablestore-internal" || name == "internal") return Target::kTableInternal;
  if (name == "cfstore" || name == "cf") return Target::kCfStore;
  return std::nullopt;
}

std::string_view target_name(Target t) {
  switch (t) {
    case Target::kTableExternal: return "tablestore-external";
    case Target::kTableInternal: return "tablestore-internal";
    case Target::kCfStore: return "cfstore";
  }
  return "?";
}

tablestore::TableSchema tweets_schema(const std::string& name) {
  using tablestore::Column;
  using tablestore::ColumnType;
  Column metrics{"public_metrics", ColumnType::kRecord, {}};
  for (const char* c : kCounters) metrics.fields.push_back({c, ColumnType::kInt64, {}});
  return {name,
          {{"id", ColumnType::kText, {}},
           {"author_id", ColumnType::kText, {}},
           {"text", ColumnType::kText, {}},
           {"created_at", ColumnType::kText, {}},
           std::move(metrics),
           {"batch_id", ColumnType::kText, {}},
           {"ingested_at", ColumnType::kText, {}}}};
}

tablestore::TableSchema users_schema(const std::string& name) {
  using tablestore::ColumnType;
  return {name, {{"id", ColumnType::kText, {}}, {"username", ColumnType::kText, {}}}};
}

LoadReport load_all(dfs::MiniDfs& dfs, tablestore::Catalog& catalog, cfstore::CfStore& cf,
                    const BatchManifest& batch, const LoadOptions& options) {
  if (!batch.preprocessed || !dfs.exists(batch.tweets_path) || !dfs.exists(batch.users_path)) {
    throw Error(ErrorCode::kFailedPrecondition,
                "batch " + batch.batch_id + " has no preprocessed output");
  }
  if (options.targets.empty()) throw Error(ErrorCode::kInvalidArgument, "no load targets");
  const bool want_ext = options.targets.count(Target::kTableExternal) > 0;
  const bool want_int = options.targets.count(Target::kTableInternal) > 0;
  const bool want_cf = options.targets.count(Target::kCfStore) > 0;

  LoadReport report;
  report.batch_id = batch.batch_id;
  if (options.replace_existing) {
    for (const char* t : {kTweetsInternalTable, kTweetsTable, kUsersTable}) {
      if ((want_ext || want_int) && catalog.has_table(t)) catalog.drop_table(t);
    }
    if (want_cf && cf.has_table(kCfTweetsTable)) cf.drop_table(kCfTweetsTable);
  }

  if (want_ext || want_int) {
    // The internal table is materialized from the external one.
    catalog.create_external_table(tweets_schema(), batch.tweets_path,
                                  tablestore::SourceFormat::kJsonLines);
    catalog.create_external_table(users_schema(), batch.users_path,
                                  tablestore::SourceFormat::kJsonLines);
    report.users = catalog.row_count(kUsersTable);
    if (want_ext) report.tweet_counts.emplace_back(Target::kTableExternal,
                                                   catalog.row_count(kTweetsTable));
    if (want_int) {
      auto info = catalog.create_internal_table_as(kTweetsInternalTable, kTweetsTable);
      report.tweet_counts.emplace_back(Target::kTableInternal, info.row_count.value_or(0));
    }
  }
  if (want_cf) {
    if (!cf.has_table(kCfTweetsTable)) cf.create_table(kCfTweetsTable, {"m", "t"});
    auto stats = cf.load_tweets(kCfTweetsTable, dfs.get_file(batch.tweets_path));
    cf.flush(kCfTweetsTable);
    report.tweet_counts.emplace_back(Target::kCfStore, stats.loaded);
  }

  for (const auto& [target, n] : report.tweet_counts) {
    if (n != batch.stats.emitted_tweets) {
      std::string detail;
      for (const auto& [t, c] : report.tweet_counts) {
        detail += " " + std::string(target_name(t)) + "=" + std::to_string(c);
      }
      throw Error(ErrorCode::kMismatch, "load of batch " + batch.batch_id + " expected " +
                                            std::to_string(batch.stats.emitted_tweets) +
                                            " tweets, got" + detail);
    }
  }
  return report;
}

}  // namespace miniplex::ingest
