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

#ifndef VNIMESH_SIM_MANAGEMENT_API_H_
#define VNIMESH_SIM_MANAGEMENT_API_H_

#include <memory>
#include <string>

#include "absl/status/statusor.h"
#include "vnimesh/cni/pod_info.h"
#include "vnimesh/sim/cluster.h"

namespace vnimesh::sim {

// Read-only HTTP view of the cluster:
//   GET /api/pods/{uid}               pod with its job's annotations and VNI
//   GET /api/jobs/{ns}/{name}
//   GET /api/claims/{ns}/{name}
//   GET /api/vnicrds?owner=job:ns/n   owner is optional
//   GET /api/admission                admission records
//   GET /healthz
class ManagementApiServer {
 public:
  explicit ManagementApiServer(const Cluster& cluster);
  ~ManagementApiServer();

  absl::StatusOr<int> Start(const std::string& host, int port);
  void Stop();
  void Wait();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// The same pod lookup without HTTP, for in-process plugin runs.
class ClusterManagementClient final : public cni::ManagementClient {
 public:
  explicit ClusterManagementClient(const Cluster& cluster) : cluster_(cluster) {}
  absl::StatusOr<cni::PodInfo> GetPod(const std::string& uid) override;

 private:
  const Cluster& cluster_;
};

}  // namespace vnimesh::sim

#endif  // VNIMESH_SIM_MANAGEMENT_API_H_
