// Copyright 2026 The vnimesh Authors
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

#ifndef VNIMESH_CNI_STATE_FILE_H_
#define VNIMESH_CNI_STATE_FILE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "vnimesh/common/types.h"
#include "vnimesh/cxi/fabric.h"

namespace vnimesh::cni {

// Services created for one container. DEL receives no annotations, so this
// record is the only way to find what to remove.
struct StateEntry {
  NodeId node;
  std::uint64_t netns_inode = 0;
  Vni vni = 0;
  std::vector<cxi::ServiceId> services;

  friend bool operator==(const StateEntry&, const StateEntry&) = default;
};

using StateMap = std::map<std::string, StateEntry>;  // keyed by container id

// JSON file under a state directory, guarded by an advisory lock on a sibling
// lock file. Writes go through a temp file and rename.
class StateFile {
 public:
  explicit StateFile(std::filesystem::path dir);

  // Runs `fn` on the current contents with the lock held and persists the
  // map if `fn` returns OK.
  absl::Status Update(const std::function<absl::Status(StateMap&)>& fn);
  absl::StatusOr<StateMap> Read() const;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path dir_;
  std::filesystem::path path_;
  std::filesystem::path lock_path_;
};

}  // namespace vnimesh::cni

#endif  // VNIMESH_CNI_STATE_FILE_H_
