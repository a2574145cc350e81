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

#include "vnimesh/endpoint/json.h"

#include <cstdint>
#include <limits>

#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::endpoint {
namespace {

using nlohmann::json;

absl::Status Malformed(std::string_view what) {
  return MakeError(ErrorKind::kMalformedRequest, what);
}

absl::StatusOr<std::string> RequiredString(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    return Malformed(StrCat("'", key, "' must be a string"));
  }
  return it->get<std::string>();
}

absl::StatusOr<Vni> ReadVni(const json& j) {
  if (!j.is_number_integer()) return Malformed("'vni' must be an integer");
  const auto v = j.get<std::int64_t>();
  if (v < 0 || v > std::numeric_limits<Vni>::max()) return Malformed("'vni' out of range");
  return static_cast<Vni>(v);
}

}  // namespace

json ToJson(const Parent& parent) {
  json meta{{"namespace", parent.ns}, {"name", parent.name}, {"annotations", parent.annotations}};
  if (parent.deleting) meta["deletionRequested"] = true;
  return json{{"apiVersion", parent.kind == ParentKind::kJob ? "batch/v1" : std::string(kApiVersion)},
              {"kind", ParentKindName(parent.kind)},
              {"metadata", std::move(meta)}};
}

json ToJson(const VniCrd& crd) {
  json spec{{"vni", crd.vni}, {"owning", crd.owning}};
  if (crd.claim_name) spec["claim"] = *crd.claim_name;
  return json{{"apiVersion", kApiVersion},
              {"kind", "VniCrd"},
              {"metadata", {{"namespace", crd.ns}, {"name", crd.name}}},
              {"spec", std::move(spec)}};
}

json ToJson(const ParentStatus& status) {
  json j{{"phase", status.phase}};
  if (status.vni) j["vni"] = *status.vni;
  if (status.reason) j["reason"] = *status.reason;
  if (!status.message.empty()) j["message"] = status.message;
  if (status.users) j["users"] = *status.users;
  return j;
}

json ToJson(const SyncRequest& req) {
  json children = json::array();
  for (const auto& c : req.children) children.push_back(ToJson(c));
  return json{{"parent", ToJson(req.parent)}, {"children", std::move(children)}};
}

json ToJson(const SyncResponse& resp) {
  json children = json::array();
  for (const auto& c : resp.children) children.push_back(ToJson(c));
  return json{{"children", std::move(children)}, {"status", ToJson(resp.status)}};
}

json ToJson(const FinalizeResponse& resp) {
  json children = json::array();
  for (const auto& c : resp.children) children.push_back(ToJson(c));
  return json{{"children", std::move(children)},
              {"finalized", resp.finalized},
              {"status", ToJson(resp.status)}};
}

absl::StatusOr<Parent> ParentFromJson(const json& j) {
  if (!j.is_object()) return Malformed("'parent' must be an object");
  Parent p;
  auto kind = RequiredString(j, "kind");
  if (!kind.ok()) return kind.status();
  if (*kind == "Job") {
    p.kind = ParentKind::kJob;
  } else if (*kind == "VniClaim") {
    p.kind = ParentKind::kVniClaim;
  } else {
    return Malformed(StrCat("unsupported parent kind '", *kind, "'"));
  }
  auto meta_it = j.find("metadata");
  if (meta_it == j.end() || !meta_it->is_object()) return Malformed("'metadata' must be an object");
  const json& meta = *meta_it;
  auto ns = RequiredString(meta, "namespace");
  if (!ns.ok()) return ns.status();
  auto name = RequiredString(meta, "name");
  if (!name.ok()) return name.status();
  p.ns = *std::move(ns);
  p.name = *std::move(name);
  if (auto ann = meta.find("annotations"); ann != meta.end() && !ann->is_null()) {
    if (!ann->is_object()) return Malformed("'annotations' must be an object");
    for (const auto& [k, v] : ann->items()) {
      if (!v.is_string()) return Malformed(StrCat("annotation '", k, "' must be a string"));
      p.annotations.emplace(k, v.get<std::string>());
    }
  }
  if (auto del = meta.find("deletionRequested"); del != meta.end()) {
    if (!del->is_boolean()) return Malformed("'deletionRequested' must be a boolean");
    p.deleting = del->get<bool>();
  }
  return p;
}

absl::StatusOr<VniCrd> VniCrdFromJson(const json& j) {
  if (!j.is_object()) return Malformed("child must be an object");
  auto meta_it = j.find("metadata");
  auto spec_it = j.find("spec");
  if (meta_it == j.end() || !meta_it->is_object() || spec_it == j.end() || !spec_it->is_object()) {
    return Malformed("child needs 'metadata' and 'spec' objects");
  }
  VniCrd crd;
  auto ns = RequiredString(*meta_it, "namespace");
  if (!ns.ok()) return ns.status();
  auto name = RequiredString(*meta_it, "name");
  if (!name.ok()) return name.status();
  crd.ns = *std::move(ns);
  crd.name = *std::move(name);
  auto vni_it = spec_it->find("vni");
  if (vni_it == spec_it->end()) return Malformed("child spec needs 'vni'");
  auto vni = ReadVni(*vni_it);
  if (!vni.ok()) return vni.status();
  crd.vni = *vni;
  crd.owning = spec_it->value("owning", true);
  if (auto claim = spec_it->find("claim"); claim != spec_it->end()) {
    if (!claim->is_string()) return Malformed("'claim' must be a string");
    crd.claim_name = claim->get<std::string>();
  }
  if (!crd.owning && !crd.claim_name) return Malformed("non-owning child needs 'claim'");
  return crd;
}

absl::StatusOr<ParentStatus> ParentStatusFromJson(const json& j) {
  if (!j.is_object()) return Malformed("'status' must be an object");
  ParentStatus s;
  s.phase = j.value("phase", "");
  if (auto v = j.find("vni"); v != j.end()) {
    auto vni = ReadVni(*v);
    if (!vni.ok()) return vni.status();
    s.vni = *vni;
  }
  if (auto r = j.find("reason"); r != j.end() && r->is_string()) s.reason = r->get<std::string>();
  s.message = j.value("message", "");
  if (auto u = j.find("users"); u != j.end() && u->is_number_unsigned()) {
    s.users = u->get<std::size_t>();
  }
  return s;
}

namespace {

absl::StatusOr<std::vector<VniCrd>> ChildrenFromJson(const json& j) {
  std::vector<VniCrd> out;
  auto it = j.find("children");
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) return Malformed("'children' must be an array");
  for (const auto& c : *it) {
    auto crd = VniCrdFromJson(c);
    if (!crd.ok()) return crd.status();
    out.push_back(*std::move(crd));
  }
  return out;
}

}  // namespace

absl::StatusOr<SyncRequest> SyncRequestFromJson(const json& j) {
  if (!j.is_object()) return Malformed("request must be an object");
  auto parent_it = j.find("parent");
  if (parent_it == j.end()) return Malformed("missing 'parent'");
  auto parent = ParentFromJson(*parent_it);
  if (!parent.ok()) return parent.status();
  auto children = ChildrenFromJson(j);
  if (!children.ok()) return children.status();
  return SyncRequest{*std::move(parent), *std::move(children)};
}

absl::StatusOr<SyncResponse> SyncResponseFromJson(const json& j) {
  if (!j.is_object()) return Malformed("response must be an object");
  auto children = ChildrenFromJson(j);
  if (!children.ok()) return children.status();
  SyncResponse resp;
  resp.children = *std::move(children);
  if (auto st = j.find("status"); st != j.end()) {
    auto status = ParentStatusFromJson(*st);
    if (!status.ok()) return status.status();
    resp.status = *std::move(status);
  }
  return resp;
}

absl::StatusOr<FinalizeResponse> FinalizeResponseFromJson(const json& j) {
  auto base = SyncResponseFromJson(j);
  if (!base.ok()) return base.status();
  auto fin = j.find("finalized");
  if (fin == j.end() || !fin->is_boolean()) return Malformed("'finalized' must be a boolean");
  return FinalizeResponse{fin->get<bool>(), std::move(base->children), std::move(base->status)};
}

absl::StatusOr<SyncRequest> ParseSyncRequest(std::string_view body) {
  auto j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return Malformed("request body is not valid JSON");
  return SyncRequestFromJson(j);
}

}  // namespace vnimesh::endpoint
