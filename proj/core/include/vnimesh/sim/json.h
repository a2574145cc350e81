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

#ifndef VNIMESH_SIM_JSON_H_
#define VNIMESH_SIM_JSON_H_

#include <ostream>
#include <mutex>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "vnimesh/sim/cluster.h"
#include "vnimesh/sim/resources.h"

namespace vnimesh::sim {

// Kubernetes-shaped documents: {"apiVersion", "kind", "metadata", "spec",
// "status"}.
nlohmann::json ToJson(const ResourceObject& obj);
absl::StatusOr<ResourceObject> ResourceObjectFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const Job& job);
nlohmann::json ToJson(const VniClaim& claim);
nlohmann::json ToJson(const Pod& pod);
nlohmann::json ToJson(const VniCrdObject& crd);
nlohmann::json ToJson(const AdmissionRecord& rec);
nlohmann::json ToJson(const ClusterSummary& summary);

// One event-log line: {"t", "kind", "namespace", "name", "uid", "from", "to",
// "reason"}. "from" is null for creations.
nlohmann::json ToJson(const Event& event);
absl::StatusOr<Event> EventFromJson(const nlohmann::json& j);

// Event sink writing JSON lines to a stream.
class JsonLinesWriter {
 public:
  explicit JsonLinesWriter(std::ostream& out) : out_(out) {}
  void operator()(const Event& event);

 private:
  std::mutex mu_;
  std::ostream& out_;
};

}  // namespace vnimesh::sim

#endif  // VNIMESH_SIM_JSON_H_
