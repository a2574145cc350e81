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

#ifndef VNIMESH_SIM_RESOURCES_H_
#define VNIMESH_SIM_RESOURCES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vnimesh/common/clock.h"
#include "vnimesh/common/types.h"
#include "vnimesh/endpoint/types.h"

namespace vnimesh::sim {

enum class Kind { kJob, kVniClaim, kVniCrd, kPod };
enum class Phase { kPending, kRunning, kSucceeded, kTerminating, kDeleted };

std::string_view KindName(Kind kind);
std::optional<Kind> ParseKind(std::string_view name);
std::string_view PhaseName(Phase phase);

struct ObjectMeta {
  std::string uid;
  std::string ns = "default";
  std::string name;
  std::map<std::string, std::string> annotations;
  bool deletion_requested = false;
  Timestamp created_at = 0;

  friend bool operator==(const ObjectMeta&, const ObjectMeta&) = default;
};

struct JobSpec {
  std::uint32_t pods = 1;
  std::vector<std::string> command = {"echo", "done"};
  double grace_period_seconds = 30;
  // How long each container runs. nullopt runs until the job is deleted.
  std::optional<double> run_seconds = 0.0;
  // Time a container takes to exit after SIGTERM; capped by the grace period.
  double termination_seconds = 0;
  // Delete the job this long after it completes. 0 deletes immediately.
  std::optional<double> ttl_seconds_after_finished;
  // Place the job's pods on distinct nodes.
  bool topology_spread = false;

  friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

// A user submission. Only Jobs and VniClaims are submitted directly; pods
// and VniCrds are owned by the controller.
struct ResourceObject {
  Kind kind = Kind::kJob;
  ObjectMeta meta;
  JobSpec job;

  friend bool operator==(const ResourceObject&, const ResourceObject&) = default;
};

struct AdmissionRecord {
  std::string job_ref;  // "job:<ns>/<name>"
  Timestamp submitted_at = 0;
  std::optional<Timestamp> started_at;
  std::optional<Timestamp> completed_at;
  std::optional<Timestamp> deleted_at;

  friend bool operator==(const AdmissionRecord&, const AdmissionRecord&) = default;
};

struct Job {
  ObjectMeta meta;
  JobSpec spec;
  Phase phase = Phase::kPending;
  std::optional<endpoint::ParentStatus> vni_status;
  std::string last_error;
  std::vector<std::string> pods;
  AdmissionRecord admission;
};

struct VniClaim {
  ObjectMeta meta;
  Phase phase = Phase::kPending;
  std::optional<endpoint::ParentStatus> vni_status;
  std::string last_error;
};

struct VniCrdObject {
  ObjectMeta meta;
  endpoint::VniCrd crd;
  std::string owner;  // JobRef or ClaimRef of the parent
  Phase phase = Phase::kRunning;
};

struct Pod {
  ObjectMeta meta;
  std::string job;
  NodeId node;
  std::uint64_t netns_inode = 0;  // 0 until the sandbox exists
  std::string container_id;
  double grace_period_seconds = 30;
  Phase phase = Phase::kPending;
  std::optional<Timestamp> started_at;
  std::string last_error;
};

// One phase transition, as written to the event log.
struct Event {
  Timestamp t = 0;
  Kind kind = Kind::kJob;
  std::string ns;
  std::string name;
  std::string uid;
  std::optional<Phase> from;
  Phase to = Phase::kPending;
  std::string reason;

  friend bool operator==(const Event&, const Event&) = default;
};

}  // namespace vnimesh::sim

#endif  // VNIMESH_SIM_RESOURCES_H_
