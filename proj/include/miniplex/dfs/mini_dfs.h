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

// A chunked, replicated file store. Each simulated storage node is a
// directory `<root>/node<k>/` holding `<block_id>.blk` payload files; the
// namespace lives in a line-delimited JSON journal, one record per mutation.
// Node availability is node state (a DOWN marker in the node directory) and is
// never written into block metadata.

#ifndef MINIPLEX_DFS_MINI_DFS_H_
#define MINIPLEX_DFS_MINI_DFS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace miniplex::dfs {

using NodeId = int;

inline constexpr std::uint64_t kDefaultBlockSize = 128ULL * 1024 * 1024;
inline constexpr int kDefaultReplication = 3;

struct BlockMeta {
  std::string block_id;
  std::string file_path;
  std::uint64_t index = 0;
  std::uint64_t length = 0;
  std::vector<NodeId> replicas;
  std::string checksum;

  bool operator==(const BlockMeta&) const = default;
};

struct FileMeta {
  std::string path;
  std::uint64_t total_length = 0;
  std::uint64_t block_size = 0;
  int replication = 0;
  std::vector<BlockMeta> blocks;

  // Blocks stored on fewer nodes than `replication` asked for.
  std::vector<std::uint64_t> under_replicated_blocks() const;

  bool operator==(const FileMeta&) const = default;
};

struct NodeState {
  NodeId id = 0;
  bool available = true;
};

struct DfsOptions {
  int num_nodes = 3;
  std::uint64_t default_block_size = kDefaultBlockSize;
  int default_replication = kDefaultReplication;
};

class MiniDfs {
 public:
  // Opens the cluster rooted at `root`, creating node directories as needed
  // and replaying the namespace journal. When the root already carries a
  // cluster descriptor, its node count takes precedence over `options`.
  MiniDfs(std::filesystem::path root, DfsOptions options = {});

  MiniDfs(const MiniDfs&) = delete;
  MiniDfs& operator=(const MiniDfs&) = delete;

  // block_size == 0 and replication == 0 select the cluster defaults.
  FileMeta put_file(const std::string& path, std::string_view content,
                    std::uint64_t block_size = 0, int replication = 0);

  // Walks each block's replica list in order, skipping unavailable nodes and
  // replicas whose payload is missing or fails its checksum.
  std::string get_file(const std::string& path) const;

  std::vector<BlockMeta> locate(const std::string& path) const;
  FileMeta stat(const std::string& path) const;
  bool exists(const std::string& path) const;

  // Sorted by path; restricted to paths starting with `prefix`.
  std::vector<FileMeta> list(std::string_view prefix = "") const;

  // Drops the namespace entry and deletes block payloads on every node.
  void remove_file(const std::string& path);

  void fail_node(NodeId node);
  void recover_node(NodeId node);
  std::vector<NodeState> nodes() const;

  const std::filesystem::path& root() const { return root_; }
  std::uint64_t default_block_size() const { return options_.default_block_size; }
  int default_replication() const { return options_.default_replication; }

  // Payload location of one replica; exposed for fault-injection tests.
  std::filesystem::path block_file(NodeId node, const std::string& block_id) const;

 private:
  std::filesystem::path node_dir(NodeId node) const;
  bool node_available(NodeId node) const;
  void check_node(NodeId node) const;
  void load_cluster_descriptor();
  void replay_journal();
  void append_journal(const std::string& record);

  std::filesystem::path root_;
  DfsOptions options_;
  mutable std::shared_mutex mu_;
  std::map<std::string, FileMeta> namespace_;
  std::uint64_t next_block_seq_ = 0;
};

}  // namespace miniplex::dfs

#endif  // MINIPLEX_DFS_MINI_DFS_H_
