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

#include "vnimesh/cxi/json.h"

#include <limits>
#include <string>

#include "absl/status/status.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::cxi {
namespace {

using nlohmann::json;

absl::StatusOr<std::uint64_t> ReadU64(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned()) {
    if (it != j.end() && it->is_number_integer() && it->get<std::int64_t>() >= 0) {
      return it->get<std::uint64_t>();
    }
    return absl::InvalidArgumentError(StrCat("'", key, "' must be an unsigned integer"));
  }
  return it->get<std::uint64_t>();
}

absl::StatusOr<std::set<Vni>> ReadVnis(const json& j) {
  auto it = j.find("vnis");
  if (it == j.end() || !it->is_array()) {
    return absl::InvalidArgumentError("'vnis' must be an array");
  }
  std::set<Vni> out;
  for (const auto& v : *it) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
        v.get<std::int64_t>() > std::numeric_limits<Vni>::max()) {
      return absl::InvalidArgumentError("VNIs must be unsigned 16-bit integers");
    }
    out.insert(static_cast<Vni>(v.get<std::int64_t>()));
  }
  return out;
}

}  // namespace

json ToJson(const MemberSpec& member) {
  return json{{"kind", MemberKindName(member.kind())}, {"value", member.value()}};
}

absl::StatusOr<MemberSpec> MemberFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("'member' must be an object");
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) {
    return absl::InvalidArgumentError("'member.kind' must be a string");
  }
  auto kind = ParseMemberKind(kind_it->get<std::string>());
  if (!kind) {
    return absl::InvalidArgumentError(
        StrCat("unknown member kind '", kind_it->get<std::string>(), "'"));
  }
  auto value = ReadU64(j, "value");
  if (!value.ok()) return value.status();
  return MemberSpec(*kind, *value);
}

json ToJson(const CreateServiceRequest& req) {
  json j{{"member", ToJson(req.member)}, {"vnis", req.vnis}};
  if (req.max_endpoints) j["max_endpoints"] = *req.max_endpoints;
  return j;
}

absl::StatusOr<CreateServiceRequest> CreateServiceRequestFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("request body must be an object");
  CreateServiceRequest req;
  auto member_it = j.find("member");
  if (member_it == j.end()) return absl::InvalidArgumentError("missing 'member'");
  auto member = MemberFromJson(*member_it);
  if (!member.ok()) return member.status();
  req.member = *member;
  auto vnis = ReadVnis(j);
  if (!vnis.ok()) return vnis.status();
  req.vnis = *std::move(vnis);
  if (j.contains("max_endpoints") && !j["max_endpoints"].is_null()) {
    auto max = ReadU64(j, "max_endpoints");
    if (!max.ok()) return max.status();
    req.max_endpoints = *max;
  }
  return req;
}

json ToJson(const CxiService& svc) {
  json j{{"id", svc.id},
         {"node", svc.node},
         {"member", ToJson(svc.member)},
         {"vnis", svc.vnis},
         {"active_endpoints", svc.active_endpoints}};
  if (svc.max_endpoints) j["max_endpoints"] = *svc.max_endpoints;
  return j;
}

absl::StatusOr<CxiService> ServiceFromJson(const json& j) {
  auto req = CreateServiceRequestFromJson(j);
  if (!req.ok()) return req.status();
  auto id = ReadU64(j, "id");
  if (!id.ok()) return id.status();
  CxiService svc;
  svc.id = *id;
  svc.node = j.value("node", "");
  svc.member = req->member;
  svc.vnis = std::move(req->vnis);
  svc.max_endpoints = req->max_endpoints;
  svc.active_endpoints = j.value("active_endpoints", std::uint64_t{0});
  return svc;
}

}  // namespace vnimesh::cxi
