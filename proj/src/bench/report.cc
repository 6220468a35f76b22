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

// Report rendering. Every timing-dependent piece of output is placed so that
// without_timings() can cut it out: named CSV and table columns, SVG lines
// tagged class="t", and two JSON keys.

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "miniplex/bench/bench.h"
#include "miniplex/common/csv.h"
#include "miniplex/common/error.h"
#include "miniplex/common/strings.h"

namespace miniplex::bench {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Exact: a whole number of nanoseconds has six decimals in milliseconds.
std::string ns_as_ms(std::int64_t ns) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%06lld", ns < 0 ? "-" : "",
                static_cast<long long>(std::abs(ns) / 1000000),
                static_cast<long long>(std::abs(ns) % 1000000));
  return buf;
}

std::string reference_cell(const BenchResult& r) {
  auto ref = reference_500k_s(r.task, r.engine);
  return ref ? fixed(*ref, 0) : "";
}

bool is_timing_column(std::string_view name) {
  return name == "mean_ms" || name == "min_ms" || name == "max_ms" || name == "vs_fastest" ||
         (name.substr(0, 4) == "run_");
}

std::string render_csv(const BenchReport& report) {
  int max_reps = 0;
  for (const auto& r : report.results) max_reps = std::max(max_reps, r.repetitions);
  csv::Row header = {"task", "engine", "dataset", "mean_ms"};
  for (int i = 1; i <= max_reps; ++i) header.push_back("run_" + std::to_string(i));
  header.push_back("ref_500k_s");
  std::string out = csv::format_row(header);
  for (const auto& r : report.results) {
    csv::Row row = {r.task, r.engine, r.dataset, fixed(r.mean_ms(), 6)};
    for (int i = 0; i < max_reps; ++i) {
      row.push_back(i < static_cast<int>(r.runs_ns.size()) ? ns_as_ms(r.runs_ns[i]) : "");
    }
    row.push_back(reference_cell(r));
    out += csv::format_row(row);
  }
  return out;
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string render_markdown(const BenchReport& report) {
  std::map<std::pair<std::string, std::string>, double> fastest;
  for (const auto& r : report.results) {
    auto key = std::make_pair(r.task, r.dataset);
    auto it = fastest.find(key);
    if (it == fastest.end() || r.mean_ns < it->second) fastest[key] = r.mean_ns;
  }
  std::string out = "# Benchmark results\n\n";
  out += "Environment: " + std::to_string(report.env.cores) + " cores, " +
         std::to_string(report.env.memory_bytes / (1024 * 1024)) + " MiB memory, miniplex " +
         report.env.version + ".\n\n";
  const std::vector<std::string> header = {"task",   "engine", "dataset",    "reps",
                                           "mean_ms", "min_ms", "max_ms", "vs_fastest",
                                           "ref_500k_s"};
  out += md_row(header);
  out += md_row(std::vector<std::string>(header.size(), "---"));
  for (const auto& r : report.results) {
    const auto [lo, hi] = std::minmax_element(r.runs_ns.begin(), r.runs_ns.end());
    const double best = fastest[{r.task, r.dataset}];
    out += md_row({r.task, r.engine, r.dataset, std::to_string(r.repetitions),
                   fixed(r.mean_ms(), 3), lo == r.runs_ns.end() ? "" : ns_as_ms(*lo),
                   hi == r.runs_ns.end() ? "" : ns_as_ms(*hi),
                   best > 0 ? fixed(r.mean_ns / best, 2) + "x" : "", reference_cell(r)});
  }
  out +=
      "\nReference timings were published for a 3-node cloud cluster and are not targets "
      "at desk scale. Compare ratios between engines instead.\n\n";
  out += md_row({"workload", "500K tweets", "5M tweets"});
  out += md_row({"---", "---", "---"});
  out += md_row({"influence, SQL over a table store", "~11 s", ""});
  out += md_row({"influence, column-family store", "~16 s", ""});
  out += md_row({"terms, MapReduce", "~28 s", ""});
  out += md_row({"graph generation", "~42 s", ""});
  out += md_row({"ingest and store", "< 1 min", "~7 min"});
  return out;
}

std::string render_svg(const BenchReport& report) {
  constexpr int kBar = 36, kGroupGap = 28, kLeft = 70, kPlotH = 200, kBlockH = 300;
  static constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f",
                                             "#e15759", "#76b7b2", "#edc948"};
  std::vector<std::string> datasets;
  for (const auto& r : report.results) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) {
      datasets.push_back(r.dataset);
    }
  }
  std::sort(datasets.begin(), datasets.end());

  std::vector<std::string> body;
  int width = 0;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const int top = static_cast<int>(d) * kBlockH + 40;
    const int base = top + kPlotH;
    std::map<std::string, std::vector<const BenchResult*>> groups;
    double max_ms = 0;
    for (const auto& r : report.results) {
      if (r.dataset != datasets[d]) continue;
      groups[r.task].push_back(&r);
      max_ms = std::max(max_ms, r.mean_ms());
    }
    if (max_ms <= 0) max_ms = 1;
    body.push_back("<text x=\"10\" y=\"" + std::to_string(top - 16) +
                   "\" font-size=\"14\">Mean wall-clock time, dataset " + datasets[d] +
                   "</text>");
    body.push_back("<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + std::to_string(top) +
                   "\" x2=\"" + std::to_string(kLeft) + "\" y2=\"" + std::to_string(base) +
                   "\" stroke=\"#333\"/>");
    body.push_back("<text class=\"t\" x=\"" + std::to_string(kLeft - 4) + "\" y=\"" +
                   std::to_string(top + 4) + "\" text-anchor=\"end\">" + fixed(max_ms, 1) +
                   " ms</text>");
    body.push_back("<text x=\"" + std::to_string(kLeft - 4) + "\" y=\"" + std::to_string(base) +
                   "\" text-anchor=\"end\">0</text>");
    int x = kLeft + kGroupGap / 2;
    for (const auto& [task, cells] : groups) {
      const int group_w = static_cast<int>(cells.size()) * kBar;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const BenchResult& r = *cells[i];
        const int bx = x + static_cast<int>(i) * kBar;
        const double h = r.mean_ms() / max_ms * kPlotH;
        body.push_back("<rect class=\"t\" x=\"" + std::to_string(bx + 2) + "\" y=\"" +
                       fixed(base - h, 2) + "\" width=\"" + std::to_string(kBar - 4) +
                       "\" height=\"" + fixed(h, 2) + "\" fill=\"" + kPalette[i % 6] + "\"/>");
        body.push_back("<text class=\"t\" x=\"" + std::to_string(bx + kBar / 2) + "\" y=\"" +
                       fixed(base - h - 4, 2) + "\" text-anchor=\"middle\">" +
                       fixed(r.mean_ms(), 1) + "</text>");
        body.push_back("<text x=\"" + std::to_string(bx + kBar / 2) + "\" y=\"" +
                       std::to_string(base + 14) + "\" text-anchor=\"end\" transform=\"rotate(-40 " +
                       std::to_string(bx + kBar / 2) + " " + std::to_string(base + 14) +
                       ")\">" + r.engine + "</text>");
      }
      body.push_back("<text x=\"" + std::to_string(x + group_w / 2) + "\" y=\"" +
                     std::to_string(base + 80) + "\" text-anchor=\"middle\" font-weight=\"bold\">" +
                     task + "</text>");
      x += group_w + kGroupGap;
    }
    body.push_back("<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + std::to_string(base) +
                   "\" x2=\"" + std::to_string(x) + "\" y2=\"" + std::to_string(base) +
                   "\" stroke=\"#333\"/>");
    width = std::max(width, x + 20);
  }
  const int height = static_cast<int>(datasets.size()) * kBlockH + 20;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
                    std::to_string(width) + " " + std::to_string(height) + "\">\n";
  out += "<style>text{font-family:sans-serif;font-size:11px}</style>\n";
  for (const auto& line : body) out += line + "\n";
  out += "</svg>\n";
  return out;
}

std::string strip_csv(std::string_view content) {
  auto rows = csv::parse(content);
  if (rows.empty()) return std::string(content);
  std::vector<bool> keep;
  for (const auto& name : rows[0]) keep.push_back(!is_timing_column(name));
  std::string out;
  for (const auto& row : rows) {
    csv::Row kept;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i >= keep.size() || keep[i]) kept.push_back(row[i]);
    }
    out += csv::format_row(kept);
  }
  return out;
}

std::vector<std::string> md_cells(std::string_view line) {
  std::vector<std::string> cells;
  auto parts = split(line, '|');
  // Leading and trailing pipes give empty first and last parts.
  for (std::size_t i = 1; i + 1 < parts.size(); ++i) cells.emplace_back(trim(parts[i]));
  return cells;
}

std::string strip_markdown(std::string_view content) {
  std::string out;
  std::vector<bool> keep;
  bool in_table = false;
  for (const auto& line : split_lines(content)) {
    const bool is_row = !line.empty() && line[0] == '|';
    if (!is_row) {
      in_table = false;
      out += line + "\n";
      continue;
    }
    auto cells = md_cells(line);
    if (!in_table) {
      in_table = true;
      keep.clear();
      for (const auto& c : cells) keep.push_back(!is_timing_column(c));
    }
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i >= keep.size() || keep[i]) kept.push_back(cells[i]);
    }
    out += md_row(kept);
  }
  return out;
}

void erase_keys(nlohmann::ordered_json& j) {
  if (j.is_object()) {
    j.erase("runs_ns");
    j.erase("mean_ns");
    for (auto& [k, v] : j.items()) erase_keys(v);
  } else if (j.is_array()) {
    for (auto& v : j) erase_keys(v);
  }
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string render_report(const BenchReport& report, ReportFormat format) {
  if (report.results.empty()) throw Error(ErrorCode::kInvalidArgument, "empty bench report");
  switch (format) {
    case ReportFormat::kCsv: return render_csv(report);
    case ReportFormat::kMarkdown: return render_markdown(report);
    case ReportFormat::kSvg: return render_svg(report);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown report format");
}

std::string without_timings(std::string_view file_name, std::string_view content) {
  if (ends_with(file_name, ".csv")) return strip_csv(content);
  if (ends_with(file_name, ".md")) return strip_markdown(content);
  if (ends_with(file_name, ".svg")) {
    std::string out;
    for (const auto& line : split_lines(content)) {
      if (line.find(" class=\"t\"") == std::string::npos) out += line + "\n";
    }
    return out;
  }
  if (ends_with(file_name, ".json")) {
    auto j = nlohmann::ordered_json::parse(content, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) return std::string(content);
    erase_keys(j);
    return j.dump(2) + "\n";
  }
  return std::string(content);
}

}  // namespace miniplex::bench
