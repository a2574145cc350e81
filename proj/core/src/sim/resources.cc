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

#include "vnimesh/sim/resources.h"

namespace vnimesh::sim {

std::string_view KindName(Kind kind) {
  switch (kind) {
    case Kind::kJob: return "Job";
    case Kind::kVniClaim: return "VniClaim";
    case Kind::kVniCrd: return "VniCrd";
    case Kind::kPod: return "Pod";
  }
  return "?";
}

std::optional<Kind> ParseKind(std::string_view name) {
  for (Kind k : {Kind::kJob, Kind::kVniClaim, Kind::kVniCrd, Kind::kPod}) {
    if (KindName(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kPending: return "Pending";
    case Phase::kRunning: return "Running";
    case Phase::kSucceeded: return "Succeeded";
    case Phase::kTerminating: return "Terminating";
    case Phase::kDeleted: return "Deleted";
  }
  return "?";
}

}  // namespace vnimesh::sim
