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

// Repeated, timed runs of (task, engine) cells and their reports.
//
// Each cell runs once untimed first. Those outputs are compared across the
// engines of each task, and any disagreement aborts the bench before a
// single timing is taken. Cells then run one after another.

#ifndef MINIPLEX_BENCH_BENCH_H_
#define MINIPLEX_BENCH_BENCH_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace miniplex::bench {

inline constexpr int kDefaultRepetitions = 10;

struct BenchCell {
  std::string task;
  std::string engine;
  // Runs the workload and returns its canonical output (a report CSV).
  std::function<std::string()> run;
};

struct BenchResult {
  std::string task;
  std::string engine;
  std::string dataset;
  std::vector<std::int64_t> runs_ns;
  int repetitions = 0;
  double mean_ns = 0;

  double mean_ms() const { return mean_ns / 1e6; }
};

// Integer sum over n, in double; 0 for an empty list.
double mean_of(const std::vector<std::int64_t>& runs_ns);

struct Fingerprint {
  unsigned cores = 0;
  std::uint64_t memory_bytes = 0;
  std::string version;
};

Fingerprint local_fingerprint();

struct BenchReport {
  std::vector<BenchResult> results;  // sorted by (task, engine, dataset)
  Fingerprint env;
};

struct BenchOptions {
  std::string dataset = "default";
  int repetitions = kDefaultRepetitions;
};

// Throws kMismatch, with a line diff, when two engines of a task disagree;
// kInvalidArgument for repetitions < 1 or duplicate cells.
BenchReport run_bench(const std::vector<BenchCell>& cells, const BenchOptions& options = {});

// First differing lines of two outputs, at most `max_lines` of them.
std::string line_diff(std::string_view a, std::string_view b, std::string_view a_name,
                      std::string_view b_name, int max_lines = 5);

// Published wall-clock seconds for a 500K-tweet dataset on a 3-node cloud
// cluster. Shown as a labelled reference only.
std::optional<double> reference_500k_s(std::string_view task, std::string_view engine);

enum class ReportFormat { kCsv, kMarkdown, kSvg };

std::optional<ReportFormat> parse_report_format(std::string_view name);
std::string_view report_extension(ReportFormat f);

// Throws kInvalidArgument on an empty report.
std::string render_report(const BenchReport& report, ReportFormat format);

// Serialization with full run lists, and its inverse.
std::string report_json(const BenchReport& report);
BenchReport parse_report_json(std::string_view json);

// The bytes of a report file with every timing-dependent field removed,
// keyed on the file name's extension. Other files pass through unchanged.
std::string without_timings(std::string_view file_name, std::string_view content);

}  // namespace miniplex::bench

#endif  // MINIPLEX_BENCH_BENCH_H_
