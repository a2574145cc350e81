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

#ifndef VNIMESH_SIM_SCENARIO_H_
#define VNIMESH_SIM_SCENARIO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "vnimesh/sim/environment.h"

namespace vnimesh::sim {

// A timed list of submissions and deletions:
//
//   {"nodes": ["n0", "n1"], "seed": 7,
//    "events": [{"at": 0, "submit": {<Job or VniClaim document>}},
//               {"at": 5, "delete": {"kind": "Job", "namespace": "ns", "name": "j"}}]}
struct ScenarioEvent {
  Timestamp at = 0;
  std::optional<ResourceObject> submit;
  Kind delete_kind = Kind::kJob;
  std::string ns;
  std::string name;
};

struct Scenario {
  std::vector<NodeId> nodes;
  std::optional<std::uint64_t> seed;
  std::vector<ScenarioEvent> events;  // sorted by time
};

absl::StatusOr<Scenario> ScenarioFromJson(const nlohmann::json& j);
absl::StatusOr<Scenario> LoadScenario(const std::filesystem::path& path);

// Applies the scenario's node list and seed.
void ApplyScenario(const Scenario& scenario, EnvironmentOptions& options);

// Replays the events and then drives the environment to quiescence. In wall
// mode events are applied at their offsets from the call, and the controller
// loop must already be running.
absl::StatusOr<EnvironmentSummary> RunScenario(Environment& env, const Scenario& scenario,
                                               double wall_timeout_seconds = 600);

}  // namespace vnimesh::sim

#endif  // VNIMESH_SIM_SCENARIO_H_
