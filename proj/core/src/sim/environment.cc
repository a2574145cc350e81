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

#include "vnimesh/sim/environment.h"

#include <stdlib.h>

#include <algorithm>
#include <chrono>

#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"
#include "vnimesh/cxi/control.h"
#include "vnimesh/endpoint/vni_endpoint.h"
#include "vnimesh/sim/management_api.h"

namespace vnimesh::sim {
namespace {

constexpr double kMaxIdleWait = 0.05;

// Lets the plugin clients exist before the cluster they read from.
class DeferredManagement final : public cni::ManagementClient {
 public:
  absl::StatusOr<cni::PodInfo> GetPod(const std::string& uid) override {
    return target->GetPod(uid);
  }
  cni::ManagementClient* target = nullptr;
};

std::string LocalUrl(int port) { return StrCat("http://127.0.0.1:", port); }

}  // namespace

struct Environment::Impl {
  EnvironmentOptions options;
  std::unique_ptr<Clock> clock;
  VirtualClock* virtual_clock = nullptr;
  std::filesystem::path temp_dir;

  std::unique_ptr<store::VniStore> store;
  std::unique_ptr<endpoint::VniEndpoint> endpoint;
  std::unique_ptr<endpoint::WebhookServer> webhook_server;
  std::unique_ptr<endpoint::Webhook> webhook;

  cxi::Fabric fabric;
  std::unique_ptr<cxi::LocalCxiControl> cxi_local;
  std::unique_ptr<cxi::ManagementServer> cxi_server;

  DeferredManagement deferred;
  std::unique_ptr<CniDriver> cni;
  std::unique_ptr<Cluster> cluster;
  std::unique_ptr<ClusterManagementClient> management;
  std::unique_ptr<ManagementApiServer> management_server;

  std::atomic<bool> loop_stop{false};
  std::thread loop;

  ~Impl() {
    if (loop.joinable()) {
      loop_stop = true;
      loop.join();
    }
    if (management_server) management_server->Stop();
    if (cxi_server) cxi_server->Stop();
    if (webhook_server) webhook_server->Stop();
    if (!temp_dir.empty()) {
      std::error_code ec;
      std::filesystem::remove_all(temp_dir, ec);
    }
  }
};

absl::StatusOr<std::unique_ptr<Environment>> Environment::Create(EnvironmentOptions options) {
  auto impl = std::make_unique<Impl>();
  const bool wall = options.clock == ClockMode::kWall;
  if (wall) {
    impl->clock = std::make_unique<WallClock>();
  } else {
    auto vc = std::make_unique<VirtualClock>();
    impl->virtual_clock = vc.get();
    impl->clock = std::move(vc);
  }
  options.cluster.retry_backoff = options.retry_backoff.value_or(wall ? 1.0 : 0.0);
  if (!options.cni_binary.empty()) options.plugin = Transport::kHttp;

  std::filesystem::path state_dir = options.state_dir;
  if (state_dir.empty()) {
    std::string tmpl = (std::filesystem::temp_directory_path() / "vnimesh-env-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) return MakeError(ErrorKind::kIo, "cannot create state directory");
    impl->temp_dir = state_dir = tmpl;
  }

  auto store = store::VniStore::Open({.path = options.store_path, .pool = options.pool,
                                      .quarantine = {options.quarantine_seconds},
                                      .clock = impl->clock.get()});
  if (!store.ok()) return store.status();
  impl->store = *std::move(store);
  impl->endpoint = std::make_unique<endpoint::VniEndpoint>(*impl->store);
  if (options.vni_enabled) {
    if (options.webhook == Transport::kHttp) {
      impl->webhook_server = std::make_unique<endpoint::WebhookServer>(*impl->endpoint, *impl->clock);
      auto port = impl->webhook_server->Start("127.0.0.1", 0);
      if (!port.ok()) return port.status();
      auto hook = endpoint::HttpWebhook::Connect(LocalUrl(*port));
      if (!hook.ok()) return hook.status();
      impl->webhook = *std::move(hook);
    } else {
      impl->webhook = std::make_unique<endpoint::InProcessWebhook>(*impl->endpoint, *impl->clock);
    }
  }

  for (const NodeId& node : options.cluster.nodes) {
    impl->fabric.AddNode(node);
  }
  impl->cxi_local = std::make_unique<cxi::LocalCxiControl>(impl->fabric);

  CniSettings settings{.state_root = state_dir};
  if (options.plugin == Transport::kHttp) {
    impl->cxi_server = std::make_unique<cxi::ManagementServer>(impl->fabric);
    auto port = impl->cxi_server->Start("127.0.0.1", 0);
    if (!port.ok()) return port.status();
    settings.cxi_url = LocalUrl(*port);
  }
  std::unique_ptr<ProtocolCniDriver> driver;
  if (!options.cni_binary.empty()) {
    driver = std::make_unique<ExecCniDriver>(settings, options.cni_binary);
  } else {
    cni::Clients clients;
    if (options.plugin == Transport::kInProcess) {
      clients = {.management = &impl->deferred, .cxi = impl->cxi_local.get()};
    }
    driver = std::make_unique<InProcessCniDriver>(settings, clients);
  }
  impl->cluster = std::make_unique<Cluster>(options.cluster, *impl->clock, impl->webhook.get(),
                                            *driver);
  impl->management = std::make_unique<ClusterManagementClient>(*impl->cluster);
  impl->deferred.target = impl->management.get();
  if (options.plugin == Transport::kHttp) {
    impl->management_server = std::make_unique<ManagementApiServer>(*impl->cluster);
    auto port = impl->management_server->Start("127.0.0.1", 0);
    if (!port.ok()) return port.status();
    driver->set_management_url(LocalUrl(*port));
  }
  impl->cni = std::move(driver);
  impl->options = std::move(options);
  return std::unique_ptr<Environment>(new Environment(std::move(impl)));
}

Environment::Environment(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Environment::~Environment() = default;

Cluster& Environment::cluster() { return *impl_->cluster; }
store::VniStore& Environment::store() { return *impl_->store; }
cxi::Fabric& Environment::fabric() { return impl_->fabric; }
const Clock& Environment::clock() const { return *impl_->clock; }
VirtualClock* Environment::virtual_clock() { return impl_->virtual_clock; }
const EnvironmentOptions& Environment::options() const { return impl_->options; }

absl::StatusOr<EnvironmentSummary> Environment::RunUntilQuiescent(std::size_t max_steps) {
  if (!impl_->virtual_clock) return absl::FailedPreconditionError("wall-clock environment");
  auto summary = impl_->cluster->RunUntilQuiescent(*impl_->virtual_clock, max_steps);
  if (!summary.ok()) return summary.status();
  auto out = Summarize();
  if (out.ok()) out->cluster = *summary;
  return out;
}

absl::Status Environment::RunUntil(Timestamp t, std::size_t max_steps) {
  if (!impl_->virtual_clock) return absl::FailedPreconditionError("wall-clock environment");
  return impl_->cluster->RunUntil(*impl_->virtual_clock, t, max_steps);
}

void Environment::StartLoop() {
  if (impl_->loop.joinable()) return;
  impl_->loop_stop = false;
  impl_->loop = std::thread([impl = impl_.get()] {
    Cluster& cluster = *impl->cluster;
    const Clock& clock = *impl->clock;
    while (!impl->loop_stop) {
      if (cluster.ReconcileStep(clock.Now()) > 0) continue;
      const Timestamp now = clock.Now();
      const auto next = cluster.NextWakeup();
      cluster.WaitForWork(std::min(next.value_or(now + kMaxIdleWait), now + kMaxIdleWait));
    }
  });
}

void Environment::StopLoop() {
  if (!impl_->loop.joinable()) return;
  impl_->loop_stop = true;
  impl_->loop.join();
}

bool Environment::WaitQuiescent(double timeout_seconds) {
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(timeout_seconds));
  while (std::chrono::steady_clock::now() < deadline) {
    if (!impl_->cluster->HasPendingWork()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return !impl_->cluster->HasPendingWork();
}

absl::StatusOr<EnvironmentSummary> Environment::Summarize() {
  EnvironmentSummary out;
  out.cluster = impl_->cluster->Summary();
  auto snapshot = impl_->store->Snapshot();
  if (!snapshot.ok()) return snapshot.status();
  for (const auto& rec : *snapshot) {
    out.vnis_allocated += rec.state == store::VniState::kAllocated;
    out.vnis_quarantined += rec.state == store::VniState::kQuarantined;
  }
  out.cxi_services = impl_->fabric.TotalServices();
  return out;
}

std::string Environment::webhook_url() const {
  return impl_->webhook_server ? LocalUrl(impl_->webhook_server->port()) : "";
}
std::string Environment::management_url() const {
  return impl_->management_server ? LocalUrl(impl_->management_server->port()) : "";
}
std::string Environment::cxi_url() const {
  return impl_->cxi_server ? LocalUrl(impl_->cxi_server->port()) : "";
}

}  // namespace vnimesh::sim
