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

#include "miniplex/bench/generator.h"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <random>
#include <system_error>

#include <nlohmann/json.hpp>

#include "miniplex/common/error.h"
#include "miniplex/common/hash.h"
#include "miniplex/common/strings.h"

namespace miniplex::bench {
namespace {

using Rng = std::mt19937_64;

constexpr std::int64_t kBaseEpoch = 1673740800;  // 2023-01-15T00:00:00Z
constexpr std::uint64_t kFollowStream = 0x9e3779b97f4a7c15ULL;

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Lemire's multiply-shift with rejection; unbiased.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Failures before the first success, success probability 1 / (1 + mean).
std::int64_t geometric(Rng& rng, double mean) {
  if (mean <= 0) return 0;
  const double u = 1.0 - uniform01(rng);  // (0, 1]
  return static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-1.0 / (1.0 + mean))));
}

class Zipf {
 public:
  Zipf(std::int64_t n, double s) : cdf_(static_cast<std::size_t>(n)) {
    double total = 0;
    for (std::int64_t k = 0; k < n; ++k) {
      total += 1.0 / std::pow(static_cast<double>(k + 1), s);
      cdf_[static_cast<std::size_t>(k)] = total;
    }
    for (auto& c : cdf_) c /= total;
  }

  std::int64_t operator()(Rng& rng) const {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return it - cdf_.begin();
  }

 private:
  std::vector<double> cdf_;
};

std::string timestamp(std::int64_t epoch) {
  std::time_t t = static_cast<std::time_t>(epoch);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S.000Z", &tm);
  return buf;
}

std::string tweet_text(Rng& rng, const Zipf& zipf, const GenSpec& spec) {
  static constexpr char kPunct[] = ",.!?";
  std::vector<std::string> tokens(5 + uniform_below(rng, 16));
  for (auto& tok : tokens) {
    tok = vocab_word(zipf(rng));
    if (uniform01(rng) < 0.05) tok[0] = static_cast<char>(tok[0] - 'a' + 'A');
    if (uniform01(rng) < 0.03) tok += kPunct[uniform_below(rng, 4)];
  }
  if (spec.topic && uniform01(rng) < spec.topic_rate) {
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, tokens.size() + 1)),
                  *spec.topic);
  }
  std::string text;
  for (const auto& tok : tokens) {
    if (!text.empty()) text += ' ';
    text += tok;
  }
  return text;
}

std::string user_id(std::int64_t i) { return "u" + std::to_string(i); }

}  // namespace

void validate(const GenSpec& s) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (s.n_tweets < 0) bad("n_tweets must be >= 0");
  if (s.n_users < 0) bad("n_users must be >= 0");
  if (s.n_tweets > 0 && s.n_users < 1) bad("n_users must be >= 1 when there are tweets");
  if (s.vocab_size < 1) bad("vocab_size must be >= 1");
  if (!(s.zipf_s > 0)) bad("zipf_s must be > 0");
  if (!(s.follow_density >= 0 && s.follow_density <= 1)) bad("follow_density must be in [0,1]");
  if (!(s.topic_rate >= 0 && s.topic_rate <= 1)) bad("topic_rate must be in [0,1]");
  if (s.topic && s.topic->empty()) bad("topic must not be empty");
}

std::string vocab_word(std::int64_t rank) {
  static constexpr char kConsonants[] = "bcdfghjklmnprstvwz";
  static constexpr char kVowels[] = "aeiou";
  constexpr std::int64_t kSyllables = 18 * 5;
  // Offset so every word has at least two syllables.
  std::int64_t n = rank + kSyllables;
  std::string word;
  while (n > 0) {
    const auto syl = n % kSyllables;
    word.insert(word.begin(), {kConsonants[syl / 5], kVowels[syl % 5]});
    n /= kSyllables;
  }
  return word;
}

GeneratedData generate_data(const GenSpec& spec) {
  validate(spec);
  GeneratedData out;
  out.follows_csv = "src,dst\n";
  if (spec.n_tweets == 0) return out;

  Rng rng(spec.seed);
  const Zipf zipf(spec.vocab_size, spec.zipf_s);
  const auto n_users = static_cast<std::uint64_t>(spec.n_users);
  for (std::int64_t i = 0; i < spec.n_tweets; ++i) {
    const auto author = static_cast<std::int64_t>(uniform_below(rng, n_users));
    const std::string text = tweet_text(rng, zipf, spec);
    const auto created = kBaseEpoch + i * 30 + static_cast<std::int64_t>(uniform_below(rng, 30));
    const std::int64_t metrics[5] = {geometric(rng, 500), geometric(rng, 20), geometric(rng, 1),
                                     geometric(rng, 3), geometric(rng, 5)};
    out.tweets_jsonl += "{\"id\":\"t" + std::to_string(i) + "\",\"author_id\":\"" +
                        user_id(author) + "\",\"text\":" + nlohmann::json(text).dump() +
                        ",\"created_at\":\"" + timestamp(created) +
                        "\",\"public_metrics\":{\"impression_count\":" +
                        std::to_string(metrics[0]) +
                        ",\"like_count\":" + std::to_string(metrics[1]) +
                        ",\"quote_count\":" + std::to_string(metrics[2]) +
                        ",\"reply_count\":" + std::to_string(metrics[3]) +
                        ",\"retweet_count\":" + std::to_string(metrics[4]) + "}}\n";
  }
  for (std::int64_t u = 0; u < spec.n_users; ++u) {
    out.users_jsonl +=
        "{\"id\":\"" + user_id(u) + "\",\"username\":\"user_" + user_id(u) + "\"}\n";
  }

  // Ordered pairs (a, b), a != b, enumerated as k = a * (n - 1) + slot;
  // geometric gaps between kept pairs give each pair probability p.
  const double p = spec.follow_density;
  const std::int64_t total = spec.n_users * (spec.n_users - 1);
  if (p > 0 && total > 0) {
    Rng frng(spec.seed ^ kFollowStream);
    const double log_q = std::log1p(-p);
    std::int64_t k = -1;
    while (true) {
      if (p >= 1) {
        ++k;
      } else {
        const double gap = std::floor(std::log(1.0 - uniform01(frng)) / log_q);
        if (gap >= static_cast<double>(total - k)) break;
        k += 1 + static_cast<std::int64_t>(gap);
      }
      if (k >= total) break;
      const std::int64_t a = k / (spec.n_users - 1);
      std::int64_t b = k % (spec.n_users - 1);
      if (b >= a) ++b;
      out.follows_csv += user_id(a) + "," + user_id(b) + "\n";
      ++out.follows;
    }
  }
  return out;
}

std::string manifest_json(const GenManifest& m) {
  nlohmann::ordered_json spec = {{"n_tweets", m.spec.n_tweets},
                                 {"n_users", m.spec.n_users},
                                 {"seed", m.spec.seed},
                                 {"vocab_size", m.spec.vocab_size},
                                 {"zipf_s", m.spec.zipf_s},
                                 {"follow_density", m.spec.follow_density}};
  if (m.spec.topic) {
    spec["topic"] = *m.spec.topic;
    spec["topic_rate"] = m.spec.topic_rate;
  }
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : m.files) {
    files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"checksum", f.checksum}});
  }
  nlohmann::ordered_json j = {{"spec", spec},
                              {"counts",
                               {{"tweets", m.tweets}, {"users", m.users}, {"follows", m.follows}}},
                              {"files", files}};
  return j.dump(2) + "\n";
}

GenManifest generate(const GenSpec& spec, const std::filesystem::path& out_dir) {
  auto data = generate_data(spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

  GenManifest m;
  m.spec = spec;
  m.tweets = spec.n_tweets;
  m.users = spec.n_tweets > 0 ? spec.n_users : 0;
  m.follows = data.follows;
  const std::pair<const char*, const std::string*> files[] = {
      {"tweets.jsonl", &data.tweets_jsonl},
      {"users.jsonl", &data.users_jsonl},
      {"follows.csv", &data.follows_csv}};
  for (const auto& [name, content] : files) {
    write_local_file(out_dir / name, *content);
    m.files.push_back({name, content->size(), hex64(fnv1a64(*content))});
  }
  write_local_file(out_dir / "manifest.json", manifest_json(m));
  return m;
}

}  // namespace miniplex::bench
