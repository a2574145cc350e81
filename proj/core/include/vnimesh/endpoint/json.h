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

#ifndef VNIMESH_ENDPOINT_JSON_H_
#define VNIMESH_ENDPOINT_JSON_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "vnimesh/endpoint/types.h"

// Webhook wire format. Objects are serialized with sorted keys and no
// insignificant whitespace, so equal values always encode to equal bytes.
// Schemas are documented in docs/webhook-schema.md.
namespace vnimesh::endpoint {

inline constexpr std::string_view kApiVersion = "vnimesh.dev/v1";

nlohmann::json ToJson(const Parent& parent);
nlohmann::json ToJson(const VniCrd& crd);
nlohmann::json ToJson(const ParentStatus& status);
nlohmann::json ToJson(const SyncRequest& req);
nlohmann::json ToJson(const SyncResponse& resp);
nlohmann::json ToJson(const FinalizeResponse& resp);

absl::StatusOr<Parent> ParentFromJson(const nlohmann::json& j);
absl::StatusOr<VniCrd> VniCrdFromJson(const nlohmann::json& j);
absl::StatusOr<ParentStatus> ParentStatusFromJson(const nlohmann::json& j);
absl::StatusOr<SyncRequest> SyncRequestFromJson(const nlohmann::json& j);
absl::StatusOr<SyncResponse> SyncResponseFromJson(const nlohmann::json& j);
absl::StatusOr<FinalizeResponse> FinalizeResponseFromJson(const nlohmann::json& j);

// Parse helpers for raw bodies; MalformedRequest on invalid JSON.
absl::StatusOr<SyncRequest> ParseSyncRequest(std::string_view body);

}  // namespace vnimesh::endpoint

#endif  // VNIMESH_ENDPOINT_JSON_H_
