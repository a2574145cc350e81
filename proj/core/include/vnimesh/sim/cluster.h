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

#ifndef VNIMESH_SIM_CLUSTER_H_
#define VNIMESH_SIM_CLUSTER_H_

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "vnimesh/cni/pod_info.h"
#include "vnimesh/common/clock.h"
#include "vnimesh/endpoint/webhook.h"
#include "vnimesh/sim/cni_driver.h"
#include "vnimesh/sim/resources.h"

namespace vnimesh::sim {

// Kubernetes-inherent time between pod creation and the runtime starting the
// sandbox: constant + uniform(0, jitter), and at most one sandbox start per
// node every `node_start_interval` seconds.
struct AdmissionCost {
  double constant = 0.5;
  double jitter = 0.25;
  double node_start_interval = 0.15;
};

struct ClusterOptions {
  std::vector<NodeId> nodes = {"n0", "n1"};
  AdmissionCost admission;
  std::uint64_t seed = 1;
  // Delay before retrying a failed webhook or CNI call, and between polls of
  // a stalled finalizer. 0 retries on the next step.
  double retry_backoff = 0;
  std::uint64_t first_netns_inode = 4026532000;
};

struct ClusterStats {
  std::size_t steps = 0;
  std::size_t sync_calls = 0;
  std::size_t finalize_calls = 0;
  std::size_t webhook_failures = 0;
  std::size_t cni_add_calls = 0;
  std::size_t cni_del_calls = 0;
  std::size_t cni_failures = 0;
};

struct ClusterSummary {
  std::size_t steps = 0;
  Timestamp now = 0;
  std::size_t jobs_submitted = 0;
  std::size_t jobs_succeeded = 0;  // jobs that ever completed
  std::size_t jobs_live = 0;
  std::size_t claims_live = 0;
  std::size_t vnicrds = 0;
  std::map<Phase, std::size_t> pods;  // live pods by phase
};

using EventSink = std::function<void(const Event&)>;

// Simulated control plane plus node agents. One reconciliation loop drives
// it; submissions and deletions may come from any thread.
//
// A step snapshots the work under the lock, issues webhook and CNI calls
// without it, and applies the results under the lock again, so management
// API reads made by the plugin during a step never block.
class Cluster {
 public:
  // `webhook` may be null: annotated parents then never sync.
  Cluster(ClusterOptions options, const Clock& clock, endpoint::Webhook* webhook,
          CniDriver& cni);
  ~Cluster();

  // Jobs and VniClaims only. Returns the new uid.
  absl::StatusOr<std::string> Submit(ResourceObject obj);
  absl::Status RequestDelete(Kind kind, const std::string& ns, const std::string& name);

  // Runs one reconciliation pass at `now` and returns the number of state
  // changes it made. Failed calls and stalled finalizers are not changes.
  std::size_t ReconcileStep(Timestamp now);

  // True while anything is still expected to happen: unsynced parents,
  // pending or finishing pods, pending deletions.
  bool HasPendingWork() const;
  // Earliest future time at which a timer fires, if any.
  std::optional<Timestamp> NextWakeup() const;

  // Virtual-time driver: steps, advancing `clock` to the next wakeup (or by
  // `idle_tick`) whenever a step changes nothing. NonQuiescent after
  // `max_steps`.
  absl::StatusOr<ClusterSummary> RunUntilQuiescent(VirtualClock& clock, std::size_t max_steps,
                                                   double idle_tick = 0.1);
  // Same, but stops once the clock reaches `until`, quiescent or not.
  absl::Status RunUntil(VirtualClock& clock, Timestamp until, std::size_t max_steps,
                        double idle_tick = 0.1);

  // Wall-time driver support: blocks until new work is submitted or
  // `deadline` passes.
  void WaitForWork(Timestamp deadline) const;

  // Read-only views.
  std::optional<Job> GetJob(const std::string& ns, const std::string& name) const;
  std::optional<VniClaim> GetClaim(const std::string& ns, const std::string& name) const;
  std::optional<Pod> GetPod(const std::string& uid) const;
  std::vector<Pod> ListPods() const;
  std::vector<Job> ListJobs() const;
  std::vector<VniCrdObject> ListVniCrds(const std::string& owner = "") const;
  // What the CNI plugin learns from the management plane.
  std::optional<cni::PodInfo> PodInfoFor(const std::string& uid) const;

  std::vector<AdmissionRecord> AdmissionRecords() const;
  // Annotated parents waiting for a webhook call.
  std::size_t ControllerQueueLength() const;
  ClusterStats stats() const;
  ClusterSummary Summary() const;

  // Called under the cluster lock for every phase transition; keep it cheap.
  void SetEventSink(EventSink sink);

  const ClusterOptions& options() const { return options_; }

 private:
  struct State;
  struct Work;

  Work Collect(Timestamp now);
  std::size_t Apply(Work& work, Timestamp now);

  ClusterOptions options_;
  const Clock& clock_;
  endpoint::Webhook* webhook_;
  CniDriver& cni_;

  mutable std::mutex mu_;
  mutable std::condition_variable work_cv_;
  std::mutex step_mu_;
  std::unique_ptr<State> state_;
};

}  // namespace vnimesh::sim

#endif  // VNIMESH_SIM_CLUSTER_H_
