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

#include "miniplex/dfs/mini_dfs.h"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <system_error>

#include <nlohmann/json.hpp>

#include "miniplex/common/error.h"
#include "miniplex/common/hash.h"
#include "miniplex/common/strings.h"

namespace miniplex::dfs {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kJournalName[] = "namespace.journal";
constexpr char kClusterName[] = "cluster.json";
constexpr char kDownMarker[] = "DOWN";

std::string block_checksum(std::string_view payload) {
  return hex64(fnv1a64(payload));
}

std::string block_id_for(std::uint64_t seq) {
  std::string digits = std::to_string(seq);
  return "blk_" + std::string(digits.size() < 8 ? 8 - digits.size() : 0, '0') +
         digits;
}

json to_json(const FileMeta& meta) {
  json blocks = json::array();
  for (const auto& b : meta.blocks) {
    blocks.push_back({{"id", b.block_id},
                      {"index", b.index},
                      {"length", b.length},
                      {"replicas", b.replicas},
                      {"checksum", b.checksum}});
  }
  return {{"op", "put"},
          {"path", meta.path},
          {"total_length", meta.total_length},
          {"block_size", meta.block_size},
          {"replication", meta.replication},
          {"blocks", std::move(blocks)}};
}

FileMeta from_json(const json& j) {
  FileMeta meta;
  meta.path = j.at("path").get<std::string>();
  meta.total_length = j.at("total_length").get<std::uint64_t>();
  meta.block_size = j.at("block_size").get<std::uint64_t>();
  meta.replication = j.at("replication").get<int>();
  for (const auto& jb : j.at("blocks")) {
    BlockMeta b;
    b.block_id = jb.at("id").get<std::string>();
    b.file_path = meta.path;
    b.index = jb.at("index").get<std::uint64_t>();
    b.length = jb.at("length").get<std::uint64_t>();
    b.replicas = jb.at("replicas").get<std::vector<NodeId>>();
    b.checksum = jb.at("checksum").get<std::string>();
    meta.blocks.push_back(std::move(b));
  }
  return meta;
}

bool write_payload(const fs::path& file, std::string_view payload) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  return static_cast<bool>(out);
}

}  // namespace

std::vector<std::uint64_t> FileMeta::under_replicated_blocks() const {
  std::vector<std::uint64_t> out;
  for (const auto& b : blocks) {
    if (static_cast<int>(b.replicas.size()) < replication) out.push_back(b.index);
  }
  return out;
}

MiniDfs::MiniDfs(std::filesystem::path root, DfsOptions options)
    : root_(std::move(root)), options_(options) {
  if (options_.default_block_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "dfs: block size must be > 0");
  }
  if (options_.default_replication < 1) {
    throw Error(ErrorCode::kInvalidArgument, "dfs: replication must be >= 1");
  }
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::kIo, "dfs: cannot create root " + root_.string());
  load_cluster_descriptor();
  if (options_.num_nodes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "dfs: cluster needs at least one node");
  }
  for (NodeId n = 0; n < options_.num_nodes; ++n) {
    fs::create_directories(node_dir(n), ec);
    if (ec) throw Error(ErrorCode::kIo, "dfs: cannot create " + node_dir(n).string());
  }
  replay_journal();
}

void MiniDfs::load_cluster_descriptor() {
  fs::path descriptor = root_ / kClusterName;
  if (fs::exists(descriptor)) {
    json j = json::parse(read_local_file(descriptor));
    options_.num_nodes = j.at("num_nodes").get<int>();
    return;
  }
  write_local_file(descriptor, json{{"num_nodes", options_.num_nodes}}.dump() + "\n");
}

void MiniDfs::replay_journal() {
  fs::path journal = root_ / kJournalName;
  if (!fs::exists(journal)) return;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(read_local_file(journal))) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kCorruption,
                  "dfs: journal line " + std::to_string(line_no) + " unparseable");
    }
    const std::string op = j.value("op", "");
    if (op == "put") {
      FileMeta meta = from_json(j);
      for (const auto& b : meta.blocks) {
        auto seq = parse_int64(std::string_view(b.block_id).substr(4));
        if (seq && static_cast<std::uint64_t>(*seq) >= next_block_seq_) {
          next_block_seq_ = static_cast<std::uint64_t>(*seq) + 1;
        }
      }
      namespace_[meta.path] = std::move(meta);
    } else if (op == "rm") {
      namespace_.erase(j.at("path").get<std::string>());
    } else {
      throw Error(ErrorCode::kCorruption, "dfs: unknown journal op '" + op + "'");
    }
  }
}

void MiniDfs::append_journal(const std::string& record) {
  std::ofstream out(root_ / kJournalName, std::ios::binary | std::ios::app);
  out << record << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "dfs: journal append failed");
}

std::filesystem::path MiniDfs::node_dir(NodeId node) const {
  return root_ / ("node" + std::to_string(node));
}

std::filesystem::path MiniDfs::block_file(NodeId node,
                                          const std::string& block_id) const {
  return node_dir(node) / (block_id + ".blk");
}

bool MiniDfs::node_available(NodeId node) const {
  return !fs::exists(node_dir(node) / kDownMarker);
}

void MiniDfs::check_node(NodeId node) const {
  if (node < 0 || node >= options_.num_nodes) {
    throw Error(ErrorCode::kNotFound, "dfs: unknown node " + std::to_string(node));
  }
}

FileMeta MiniDfs::put_file(const std::string& path, std::string_view content,
                           std::uint64_t block_size, int replication) {
  if (path.empty() || path.front() != '/') {
    throw Error(ErrorCode::kInvalidArgument,
                "dfs: path must be absolute: '" + path + "'");
  }
  if (block_size == 0) block_size = options_.default_block_size;
  if (replication == 0) replication = options_.default_replication;
  if (replication < 1) {
    throw Error(ErrorCode::kInvalidArgument, "dfs: replication must be >= 1");
  }

  std::unique_lock lock(mu_);
  if (namespace_.count(path)) {
    throw Error(ErrorCode::kAlreadyExists, "dfs: " + path + " already exists");
  }
  std::vector<NodeId> live;
  for (NodeId n = 0; n < options_.num_nodes; ++n) {
    if (node_available(n)) live.push_back(n);
  }
  if (live.empty()) {
    throw Error(ErrorCode::kUnavailable, "dfs: no available nodes");
  }

  FileMeta meta;
  meta.path = path;
  meta.total_length = content.size();
  meta.block_size = block_size;
  meta.replication = replication;
  const std::size_t want =
      std::min<std::size_t>(static_cast<std::size_t>(replication), live.size());
  std::uint64_t seq = next_block_seq_;
  for (std::uint64_t offset = 0, index = 0; offset < content.size();
       offset += block_size, ++index, ++seq) {
    std::string_view payload = content.substr(offset, block_size);
    BlockMeta block;
    block.block_id = block_id_for(seq);
    block.file_path = path;
    block.index = index;
    block.length = payload.size();
    block.checksum = block_checksum(payload);
    const std::size_t start = seq % live.size();
    for (std::size_t k = 0; k < live.size() && block.replicas.size() < want; ++k) {
      NodeId node = live[(start + k) % live.size()];
      if (write_payload(block_file(node, block.block_id), payload)) {
        block.replicas.push_back(node);
      }
    }
    if (block.replicas.empty()) {
      throw Error(ErrorCode::kIo, "dfs: write of block " + std::to_string(index) +
                                      " of " + path + " failed on all nodes");
    }
    meta.blocks.push_back(std::move(block));
  }
  append_journal(to_json(meta).dump());
  next_block_seq_ = seq;
  namespace_[path] = meta;
  return meta;
}

std::string MiniDfs::get_file(const std::string& path) const {
  std::shared_lock lock(mu_);
  auto it = namespace_.find(path);
  if (it == namespace_.end()) {
    throw Error(ErrorCode::kNotFound, "dfs: no such file " + path);
  }
  const FileMeta& meta = it->second;
  std::string out;
  out.reserve(meta.total_length);
  for (const auto& block : meta.blocks) {
    bool ok = false;
    for (NodeId node : block.replicas) {
      if (!node_available(node)) continue;
      std::ifstream in(block_file(node, block.block_id), std::ios::binary);
      if (!in) continue;
      std::string payload(block.length, '\0');
      in.read(payload.data(), static_cast<std::streamsize>(block.length));
      if (static_cast<std::uint64_t>(in.gcount()) != block.length ||
          in.peek() != std::char_traits<char>::eof()) {
        continue;
      }
      if (block_checksum(payload) != block.checksum) continue;
      out += payload;
      ok = true;
      break;
    }
    if (!ok) {
      throw Error(ErrorCode::kUnavailable,
                  "dfs: block " + std::to_string(block.index) + " of " + path +
                      " has no readable replica");
    }
  }
  return out;
}

std::vector<BlockMeta> MiniDfs::locate(const std::string& path) const {
  return stat(path).blocks;
}

FileMeta MiniDfs::stat(const std::string& path) const {
  std::shared_lock lock(mu_);
  auto it = namespace_.find(path);
  if (it == namespace_.end()) {
    throw Error(ErrorCode::kNotFound, "dfs: no such file " + path);
  }
  return it->second;
}

bool MiniDfs::exists(const std::string& path) const {
  std::shared_lock lock(mu_);
  return namespace_.count(path) > 0;
}

std::vector<FileMeta> MiniDfs::list(std::string_view prefix) const {
  std::shared_lock lock(mu_);
  std::vector<FileMeta> out;
  for (auto it = namespace_.lower_bound(std::string(prefix));
       it != namespace_.end() && it->first.starts_with(prefix); ++it) {
    out.push_back(it->second);
  }
  return out;
}

void MiniDfs::remove_file(const std::string& path) {
  std::unique_lock lock(mu_);
  auto it = namespace_.find(path);
  if (it == namespace_.end()) {
    throw Error(ErrorCode::kNotFound, "dfs: no such file " + path);
  }
  append_journal(json{{"op", "rm"}, {"path", path}}.dump());
  for (const auto& block : it->second.blocks) {
    for (NodeId node : block.replicas) {
      std::error_code ec;
      fs::remove(block_file(node, block.block_id), ec);
    }
  }
  namespace_.erase(it);
}

void MiniDfs::fail_node(NodeId node) {
  std::unique_lock lock(mu_);
  check_node(node);
  if (node_available(node)) write_local_file(node_dir(node) / kDownMarker, "");
}

void MiniDfs::recover_node(NodeId node) {
  std::unique_lock lock(mu_);
  check_node(node);
  std::error_code ec;
  fs::remove(node_dir(node) / kDownMarker, ec);
}

std::vector<NodeState> MiniDfs::nodes() const {
  std::shared_lock lock(mu_);
  std::vector<NodeState> out;
  for (NodeId n = 0; n < options_.num_nodes; ++n) {
    out.push_back({n, node_available(n)});
  }
  return out;
}

}  // namespace miniplex::dfs
