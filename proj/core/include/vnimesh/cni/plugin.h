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

#ifndef VNIMESH_CNI_PLUGIN_H_
#define VNIMESH_CNI_PLUGIN_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "vnimesh/cni/pod_info.h"
#include "vnimesh/cxi/control.h"

namespace vnimesh::cni {

inline constexpr std::array<std::string_view, 3> kSupportedVersions = {"0.4.0", "1.0.0",
                                                                       "1.1.0"};
inline constexpr double kMaxGracePeriodSeconds = 30;

// Error codes in the CNI error object. 1-11 are reserved by the CNI
// protocol; 100 and up are ours.
enum class CniErrorCode : int {
  kIncompatibleVersion = 1,
  kUnsupportedField = 2,
  kUnknownContainer = 3,
  kInvalidEnvironment = 4,
  kIoFailure = 5,
  kDecodeFailure = 6,
  kInvalidConfig = 7,
  kTryAgainLater = 11,
  kVniUnavailable = 100,
  kGracePeriodTooLong = 101,
  kManagementApiUnreachable = 102,
  kCxiUnreachable = 103,
  kPodNotFound = 104,
};

// One plugin execution: the CNI_* environment and the network configuration
// on stdin.
struct Invocation {
  std::map<std::string, std::string> env;
  std::string stdin_data;
};

struct Outcome {
  std::string stdout_data;
  int exit_code = 0;
};

// Clients injected by an in-process runtime. Null members are built from the
// "vniManagementApi" and "cxiSocket" configuration keys.
struct Clients {
  ManagementClient* management = nullptr;
  cxi::CxiControl* cxi = nullptr;
};

// Executes one CNI command. Never throws; every failure becomes a CNI error
// object on stdout with exit code 1.
Outcome Run(const Invocation& inv, const Clients& clients = {});

// Simulated namespaces live at ".../simns-<inode>". Other paths are stat'ed.
absl::StatusOr<std::uint64_t> NetnsInode(const std::string& netns_path);

std::string SimNetnsPath(std::uint64_t inode);

}  // namespace vnimesh::cni

#endif  // VNIMESH_CNI_PLUGIN_H_
