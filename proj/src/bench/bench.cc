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

#include "miniplex/bench/bench.h"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "miniplex/common/error.h"
#include "miniplex/common/strings.h"

#ifndef MINIPLEX_VERSION
#define MINIPLEX_VERSION "unknown"
#endif

namespace miniplex::bench {

double mean_of(const std::vector<std::int64_t>& runs_ns) {
  if (runs_ns.empty()) return 0;
  std::int64_t sum = 0;
  for (auto r : runs_ns) sum += r;
  return static_cast<double>(sum) / static_cast<double>(runs_ns.size());
}

Fingerprint local_fingerprint() {
  Fingerprint f;
  f.cores = std::thread::hardware_concurrency();
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page_size = sysconf(_SC_PAGE_SIZE);
  if (pages > 0 && page_size > 0) {
    f.memory_bytes = static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page_size);
  }
  f.version = MINIPLEX_VERSION;
  return f;
}

std::string line_diff(std::string_view a, std::string_view b, std::string_view a_name,
                      std::string_view b_name, int max_lines) {
  const auto la = split_lines(a);
  const auto lb = split_lines(b);
  std::string out;
  int shown = 0;
  const std::size_t n = std::max(la.size(), lb.size());
  for (std::size_t i = 0; i < n && shown < max_lines; ++i) {
    const std::string* x = i < la.size() ? &la[i] : nullptr;
    const std::string* y = i < lb.size() ? &lb[i] : nullptr;
    if (x && y && *x == *y) continue;
    out += "line " + std::to_string(i + 1) + ":\n";
    out += "  " + std::string(a_name) + ": " + (x ? *x : "<missing>") + "\n";
    out += "  " + std::string(b_name) + ": " + (y ? *y : "<missing>") + "\n";
    ++shown;
  }
  return out;
}

BenchReport run_bench(const std::vector<BenchCell>& cells, const BenchOptions& options) {
  if (options.repetitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& c : cells) {
    if (!seen.insert({c.task, c.engine}).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate cell " + c.task + "/" + c.engine);
    }
  }

  // Untimed pass; doubles as the warm-up run of each cell.
  std::map<std::string, std::pair<std::string, std::string>> first_of_task;
  for (const auto& c : cells) {
    std::string out = c.run();
    auto [it, inserted] = first_of_task.try_emplace(c.task, c.engine, std::string());
    if (inserted) {
      it->second.second = std::move(out);
      continue;
    }
    const auto& [ref_engine, ref_out] = it->second;
    if (out != ref_out) {
      throw Error(ErrorCode::kMismatch, "engines disagree on task " + c.task + ": " + ref_engine +
                                            " vs " + c.engine + "\n" +
                                            line_diff(ref_out, out, ref_engine, c.engine));
    }
  }

  std::vector<const BenchCell*> order;
  for (const auto& c : cells) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const BenchCell* a, const BenchCell* b) {
    return std::tie(a->task, a->engine) < std::tie(b->task, b->engine);
  });

  BenchReport report;
  report.env = local_fingerprint();
  for (const BenchCell* c : order) {
    BenchResult r;
    r.task = c->task;
    r.engine = c->engine;
    r.dataset = options.dataset;
    r.repetitions = options.repetitions;
    for (int i = 0; i < options.repetitions; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      c->run();
      const auto t1 = std::chrono::steady_clock::now();
      r.runs_ns.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    }
    r.mean_ns = mean_of(r.runs_ns);
    report.results.push_back(std::move(r));
  }
  return report;
}

std::optional<double> reference_500k_s(std::string_view task, std::string_view engine) {
  if (task == "influence") {
    if (engine == "sql-external" || engine == "sql-internal") return 11;
    if (engine == "cf-scan") return 16;
  }
  if (task == "terms" && engine == "mapreduce") return 28;
  if (task == "graph") return 42;
  return std::nullopt;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "md" || name == "markdown") return ReportFormat::kMarkdown;
  if (name == "svg" || name == "svg-bars") return ReportFormat::kSvg;
  return std::nullopt;
}

std::string_view report_extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::kCsv: return "csv";
    case ReportFormat::kMarkdown: return "md";
    case ReportFormat::kSvg: return "svg";
  }
  return "txt";
}

std::string report_json(const BenchReport& report) {
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  for (const auto& r : report.results) {
    results.push_back({{"task", r.task},
                       {"engine", r.engine},
                       {"dataset", r.dataset},
                       {"repetitions", r.repetitions},
                       {"runs_ns", r.runs_ns},
                       {"mean_ns", r.mean_ns}});
  }
  nlohmann::ordered_json j = {{"env",
                               {{"cores", report.env.cores},
                                {"memory_bytes", report.env.memory_bytes},
                                {"version", report.env.version}}},
                              {"results", results}};
  return j.dump(2) + "\n";
}

BenchReport parse_report_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    BenchReport report;
    const auto& env = j.at("env");
    report.env.cores = env.at("cores").get<unsigned>();
    report.env.memory_bytes = env.at("memory_bytes").get<std::uint64_t>();
    report.env.version = env.at("version").get<std::string>();
    for (const auto& r : j.at("results")) {
      BenchResult b;
      b.task = r.at("task").get<std::string>();
      b.engine = r.at("engine").get<std::string>();
      b.dataset = r.at("dataset").get<std::string>();
      b.repetitions = r.at("repetitions").get<int>();
      b.runs_ns = r.at("runs_ns").get<std::vector<std::int64_t>>();
      b.mean_ns = r.at("mean_ns").get<double>();
      report.results.push_back(std::move(b));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruption, std::string("bad bench report: ") + e.what());
  }
}

}  // namespace miniplex::bench
