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

#ifndef VNIMESH_ENDPOINT_TYPES_H_
#define VNIMESH_ENDPOINT_TYPES_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "vnimesh/common/types.h"

namespace vnimesh::endpoint {

// Annotation key that opts a parent into VNI management.
inline constexpr std::string_view kVniAnnotation = "vni";
// Annotation value selecting the Per-Resource model.
inline constexpr std::string_view kPerResourceValue = "true";

enum class ParentKind { kJob, kVniClaim };
std::string_view ParentKindName(ParentKind kind);

struct Parent {
  ParentKind kind = ParentKind::kJob;
  std::string ns;
  std::string name;
  std::map<std::string, std::string> annotations;
  bool deleting = false;

  friend bool operator==(const Parent&, const Parent&) = default;
};

// Child object describing one VNI binding. Non-owning ("virtual") instances
// bind a claim-redeeming job to the claim's VNI.
struct VniCrd {
  std::string name;
  std::string ns;
  Vni vni = 0;
  bool owning = true;
  std::optional<std::string> claim_name;

  friend bool operator==(const VniCrd&, const VniCrd&) = default;
};

struct SyncRequest {
  Parent parent;
  std::vector<VniCrd> children;  // observed

  friend bool operator==(const SyncRequest&, const SyncRequest&) = default;
};

// Surfaced on the parent object by the controller.
struct ParentStatus {
  std::string phase;                  // "Bound" | "Failed" | "Terminating" | "Released"
  std::optional<Vni> vni;
  std::optional<std::string> reason;  // ErrorKind name when phase == "Failed"
  std::string message;
  std::optional<std::size_t> users;

  friend bool operator==(const ParentStatus&, const ParentStatus&) = default;
};

struct SyncResponse {
  std::vector<VniCrd> children;  // desired, at most one
  ParentStatus status;

  friend bool operator==(const SyncResponse&, const SyncResponse&) = default;
};

struct FinalizeResponse {
  bool finalized = true;
  std::vector<VniCrd> children;
  ParentStatus status;

  friend bool operator==(const FinalizeResponse&, const FinalizeResponse&) = default;
};

// How a parent asks for a VNI.
struct VniRequest {
  enum class Model { kPerResource, kClaim };
  Model model = Model::kPerResource;
  std::string claim_name;  // set for kClaim
};

// nullopt when the parent carries no `vni` annotation. MalformedAnnotation
// when the value is empty or not a valid object name.
absl::StatusOr<std::optional<VniRequest>> ParseVniAnnotation(
    const std::map<std::string, std::string>& annotations);

// "job:<ns>/<name>" and "claim:<ns>/<name>": owner and user references in the
// VNI database.
std::string JobRef(std::string_view ns, std::string_view name);
std::string ClaimRef(std::string_view ns, std::string_view name);

// Child name for a parent: "<parent-name>-vni".
std::string ChildName(std::string_view parent_name);

}  // namespace vnimesh::endpoint

#endif  // VNIMESH_ENDPOINT_TYPES_H_
