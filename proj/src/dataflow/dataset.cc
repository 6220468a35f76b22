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

#include "miniplex/dataflow/dataset.h"

#include "miniplex/common/strings.h"
#include "miniplex/dfs/mini_dfs.h"

namespace miniplex::dataflow {

namespace detail {

Partitions<std::string> TextFileSource::compute(ContextState& state) const {
  std::string content = dfs_.get_file(path_);
  state.bytes_read += content.size();
  state.source_reads++;
  return split_contiguous(split_lines(content), partitions());
}

}  // namespace detail

Dataset<std::string> Context::from_text_file(const dfs::MiniDfs& dfs, std::string path,
                                             int partitions) const {
  if (partitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "dataflow: partitions must be >= 1");
  }
  return Dataset<std::string>(
      std::make_shared<detail::TextFileSource>(dfs, std::move(path), partitions), state_);
}

}  // namespace miniplex::dataflow
