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

#ifndef VNIMESH_SIM_CNI_DRIVER_H_
#define VNIMESH_SIM_CNI_DRIVER_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "vnimesh/cni/plugin.h"
#include "vnimesh/common/types.h"

namespace vnimesh::sim {

// The container runtime's view of a pod sandbox.
struct PodSandbox {
  std::string pod_uid;
  std::string ns;
  std::string name;
  NodeId node;
  std::string container_id;
  std::uint64_t netns_inode = 0;
};

// How the runtime invokes the network plugin chain. Errors carry the plugin's
// failure kind (VniUnavailable, GracePeriodTooLong, ...).
class CniDriver {
 public:
  virtual ~CniDriver() = default;
  virtual absl::Status Add(const PodSandbox& sandbox) = 0;
  virtual absl::Status Del(const PodSandbox& sandbox) = 0;
};

class NoopCniDriver final : public CniDriver {
 public:
  absl::Status Add(const PodSandbox&) override { return absl::OkStatus(); }
  absl::Status Del(const PodSandbox&) override { return absl::OkStatus(); }
};

// Where the plugin finds its collaborators and keeps per-node state.
struct CniSettings {
  std::filesystem::path state_root;      // state for node N lives in state_root/N
  std::string management_url;            // used when no client is injected
  std::string cxi_url;
  std::string cni_version = "1.0.0";
};

// Speaks the CNI wire protocol (environment plus stdin configuration) to the
// plugin. The previous plugin in the chain is modelled by a fixed bridge
// result carrying the sandbox path.
class ProtocolCniDriver : public CniDriver {
 public:
  explicit ProtocolCniDriver(CniSettings settings) : settings_(std::move(settings)) {}

  absl::Status Add(const PodSandbox& sandbox) override;
  absl::Status Del(const PodSandbox& sandbox) override;

  std::size_t invocations() const { return invocations_; }
  // For runtimes that learn the API address only after the cluster is up.
  // Must be called before the first invocation.
  void set_management_url(std::string url) { settings_.management_url = std::move(url); }

  cni::Invocation BuildInvocation(std::string_view command, const PodSandbox& sandbox) const;

 protected:
  virtual absl::StatusOr<cni::Outcome> Execute(const cni::Invocation& inv) = 0;

 private:
  absl::Status Invoke(std::string_view command, const PodSandbox& sandbox);

  CniSettings settings_;
  std::atomic<std::size_t> invocations_{0};
};

// Runs the plugin in-process, optionally with injected clients.
class InProcessCniDriver final : public ProtocolCniDriver {
 public:
  InProcessCniDriver(CniSettings settings, cni::Clients clients)
      : ProtocolCniDriver(std::move(settings)), clients_(clients) {}

 protected:
  absl::StatusOr<cni::Outcome> Execute(const cni::Invocation& inv) override;

 private:
  cni::Clients clients_;
};

// Executes the plugin binary once per invocation, like a real runtime.
class ExecCniDriver final : public ProtocolCniDriver {
 public:
  ExecCniDriver(CniSettings settings, std::string binary)
      : ProtocolCniDriver(std::move(settings)), binary_(std::move(binary)) {}

 protected:
  absl::StatusOr<cni::Outcome> Execute(const cni::Invocation& inv) override;

 private:
  std::string binary_;
};

}  // namespace vnimesh::sim

#endif  // VNIMESH_SIM_CNI_DRIVER_H_
