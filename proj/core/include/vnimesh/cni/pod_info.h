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

#ifndef VNIMESH_CNI_POD_INFO_H_
#define VNIMESH_CNI_POD_INFO_H_

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "vnimesh/common/types.h"

namespace vnimesh::cni {

// What the plugin learns about a pod from the management plane: the parent
// job's annotations and the VNI bound to that job, if any.
struct PodInfo {
  std::string uid;
  std::string ns;
  std::string name;
  NodeId node;
  double grace_period_seconds = 30;
  std::string job;
  std::map<std::string, std::string> annotations;
  std::optional<Vni> vni;

  friend bool operator==(const PodInfo&, const PodInfo&) = default;
};

// Wire shape of GET /api/pods/{uid}.
nlohmann::json ToJson(const PodInfo& pod);
absl::StatusOr<PodInfo> PodInfoFromJson(const nlohmann::json& j);

class ManagementClient {
 public:
  virtual ~ManagementClient() = default;
  // NotFound for unknown pods.
  virtual absl::StatusOr<PodInfo> GetPod(const std::string& uid) = 0;
};

// Transport failures surface as ManagementApiUnreachable.
class HttpManagementClient final : public ManagementClient {
 public:
  static absl::StatusOr<std::unique_ptr<HttpManagementClient>> Connect(
      const std::string& url, std::chrono::milliseconds timeout = std::chrono::seconds(5));
  ~HttpManagementClient() override;

  absl::StatusOr<PodInfo> GetPod(const std::string& uid) override;

 private:
  struct Impl;
  explicit HttpManagementClient(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace vnimesh::cni

#endif  // VNIMESH_CNI_POD_INFO_H_
