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

#ifndef VNIMESH_SIM_ENVIRONMENT_H_
#define VNIMESH_SIM_ENVIRONMENT_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "absl/status/statusor.h"
#include "vnimesh/common/clock.h"
#include "vnimesh/common/types.h"
#include "vnimesh/cxi/fabric.h"
#include "vnimesh/endpoint/webhook.h"
#include "vnimesh/sim/cluster.h"
#include "vnimesh/store/vni_store.h"

namespace vnimesh::sim {

enum class ClockMode { kVirtual, kWall };
enum class Transport { kInProcess, kHttp };

struct EnvironmentOptions {
  ClockMode clock = ClockMode::kVirtual;
  ClusterOptions cluster;
  // Defaults to 0 in virtual mode and 1 s in wall mode.
  std::optional<double> retry_backoff;
  // false bypasses the VNI endpoint entirely.
  bool vni_enabled = true;
  Transport webhook = Transport::kInProcess;
  // kHttp makes the plugin reach the management API and the CXI socket over
  // HTTP, as a separately installed binary would.
  Transport plugin = Transport::kInProcess;
  // Non-empty: execute this plugin binary per invocation (implies kHttp).
  std::string cni_binary;
  std::string store_path = ":memory:";
  double quarantine_seconds = 30;
  VniRange pool;
  // Empty: a private temporary directory, removed on destruction.
  std::filesystem::path state_dir;
};

struct EnvironmentSummary {
  ClusterSummary cluster;
  std::size_t vnis_allocated = 0;
  std::size_t vnis_quarantined = 0;
  std::size_t cxi_services = 0;
};

// Everything wired together in one process: VNI store and endpoint, a
// fabric with one registry per node, the plugin and the cluster.
class Environment {
 public:
  static absl::StatusOr<std::unique_ptr<Environment>> Create(EnvironmentOptions options);
  ~Environment();

  Cluster& cluster();
  store::VniStore& store();
  cxi::Fabric& fabric();
  const Clock& clock() const;
  // Null in wall mode.
  VirtualClock* virtual_clock();
  const EnvironmentOptions& options() const;

  // Virtual mode only.
  absl::StatusOr<EnvironmentSummary> RunUntilQuiescent(std::size_t max_steps = 1'000'000);
  absl::Status RunUntil(Timestamp t, std::size_t max_steps = 1'000'000);

  // Wall mode: a controller thread steps the cluster as work becomes due.
  void StartLoop();
  void StopLoop();
  // Polls until the cluster has no pending work. False on timeout.
  bool WaitQuiescent(double timeout_seconds);

  absl::StatusOr<EnvironmentSummary> Summarize();

  // Empty unless the corresponding HTTP server is running.
  std::string webhook_url() const;
  std::string management_url() const;
  std::string cxi_url() const;

 private:
  struct Impl;
  explicit Environment(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace vnimesh::sim

#endif  // VNIMESH_SIM_ENVIRONMENT_H_
