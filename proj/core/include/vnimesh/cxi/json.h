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

#ifndef VNIMESH_CXI_JSON_H_
#define VNIMESH_CXI_JSON_H_

#include <cstdint>
#include <optional>
#include <set>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "vnimesh/cxi/fabric.h"

namespace vnimesh::cxi {

// Body of POST /nodes/{node}/services.
struct CreateServiceRequest {
  MemberSpec member = MemberSpec::Uid(0);
  std::set<Vni> vnis;
  std::optional<std::uint64_t> max_endpoints;
};

nlohmann::json ToJson(const MemberSpec& member);
absl::StatusOr<MemberSpec> MemberFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const CreateServiceRequest& req);
absl::StatusOr<CreateServiceRequest> CreateServiceRequestFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const CxiService& svc);
absl::StatusOr<CxiService> ServiceFromJson(const nlohmann::json& j);

}  // namespace vnimesh::cxi

#endif  // VNIMESH_CXI_JSON_H_
