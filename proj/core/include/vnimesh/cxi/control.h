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

#ifndef VNIMESH_CXI_CONTROL_H_
#define VNIMESH_CXI_CONTROL_H_

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "vnimesh/cxi/fabric.h"
#include "vnimesh/cxi/json.h"

namespace vnimesh::cxi {

// Privileged service management, the subset of the driver that the CNI
// plugin needs.
class CxiControl {
 public:
  virtual ~CxiControl() = default;
  virtual absl::StatusOr<ServiceId> CreateService(const NodeId& node,
                                                  const CreateServiceRequest& req) = 0;
  virtual absl::Status DeleteService(const NodeId& node, ServiceId id) = 0;
  virtual absl::StatusOr<std::vector<CxiService>> ListServices(const NodeId& node) = 0;
};

class LocalCxiControl final : public CxiControl {
 public:
  explicit LocalCxiControl(Fabric& fabric) : fabric_(fabric) {}

  absl::StatusOr<ServiceId> CreateService(const NodeId& node,
                                          const CreateServiceRequest& req) override;
  absl::Status DeleteService(const NodeId& node, ServiceId id) override;
  absl::StatusOr<std::vector<CxiService>> ListServices(const NodeId& node) override;

 private:
  Fabric& fabric_;
};

// Talks to a ManagementServer. Transport failures come back as CxiUnreachable.
class HttpCxiControl final : public CxiControl {
 public:
  static absl::StatusOr<std::unique_ptr<HttpCxiControl>> Connect(
      const std::string& url, std::chrono::milliseconds timeout = std::chrono::seconds(5));
  ~HttpCxiControl() override;

  absl::StatusOr<ServiceId> CreateService(const NodeId& node,
                                          const CreateServiceRequest& req) override;
  absl::Status DeleteService(const NodeId& node, ServiceId id) override;
  absl::StatusOr<std::vector<CxiService>> ListServices(const NodeId& node) override;

 private:
  struct Impl;
  explicit HttpCxiControl(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

// Local management socket exposing the registry over HTTP+JSON:
//   POST   /nodes/{node}/services        -> 201 {"id": N}
//   DELETE /nodes/{node}/services/{id}   -> 204
//   GET    /nodes/{node}/services        -> 200 [service...]
class ManagementServer {
 public:
  explicit ManagementServer(Fabric& fabric);
  ~ManagementServer();

  // Port 0 picks an ephemeral port. Returns the bound port.
  absl::StatusOr<int> Start(const std::string& host, int port);
  void Stop();
  void Wait();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vnimesh::cxi

#endif  // VNIMESH_CXI_CONTROL_H_
