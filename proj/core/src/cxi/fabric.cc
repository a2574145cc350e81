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

#include "vnimesh/cxi/fabric.h"

#include <algorithm>
#include <utility>

#include "vnimesh/common/strings.h"
#include "vnimesh/common/errors.h"

namespace vnimesh::cxi {

std::string_view MemberKindName(MemberKind kind) {
  switch (kind) {
    case MemberKind::kUid:
      return "uid";
    case MemberKind::kGid:
      return "gid";
    case MemberKind::kNetns:
      return "netns";
  }
  return "unknown";
}

std::optional<MemberKind> ParseMemberKind(std::string_view name) {
  if (name == "uid") return MemberKind::kUid;
  if (name == "gid") return MemberKind::kGid;
  if (name == "netns") return MemberKind::kNetns;
  return std::nullopt;
}

bool MemberMatches(const MemberSpec& member, const ProcessContext& ctx) {
  switch (member.kind()) {
    case MemberKind::kUid:
      return ctx.uid == member.value();
    case MemberKind::kGid:
      return ctx.gid == member.value();
    case MemberKind::kNetns:
      return ctx.netns_inode == member.value();
  }
  return false;
}

std::string_view DropReasonName(DropReason reason) {
  switch (reason) {
    case DropReason::kVniMismatch:
      return "VniMismatch";
    case DropReason::kNoService:
      return "NoService";
    case DropReason::kDeadEndpoint:
      return "DeadEndpoint";
  }
  return "Unknown";
}

Fabric::Fabric(std::span<const NodeId> nodes) {
  for (const auto& node : nodes) AddNode(node);
}

Fabric::Fabric(std::initializer_list<NodeId> nodes) {
  for (const auto& node : nodes) AddNode(node);
}

void Fabric::AddNode(const NodeId& node) {
  std::unique_lock lock(nodes_mu_);
  nodes_.try_emplace(node, std::make_unique<Node>());
}

std::vector<NodeId> Fabric::Nodes() const {
  std::shared_lock lock(nodes_mu_);
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  for (const auto& [id, _] : nodes_) out.push_back(id);
  return out;
}

// Nodes are never removed, so the returned pointer stays valid.
Fabric::Node* Fabric::FindNode(const NodeId& node) const {
  std::shared_lock lock(nodes_mu_);
  auto it = nodes_.find(node);
  return it == nodes_.end() ? nullptr : it->second.get();
}

absl::StatusOr<ServiceId> Fabric::CreateService(const NodeId& node, MemberSpec member,
                                                std::set<Vni> vnis,
                                                std::optional<std::uint64_t> max_endpoints) {
  if (vnis.empty()) {
    return MakeError(ErrorKind::kEmptyVniSet, "a CXI service needs at least one VNI");
  }
  Node* n = FindNode(node);
  if (n == nullptr) return MakeError(ErrorKind::kUnknownNode, StrCat("unknown node ", node));

  std::lock_guard lock(n->mu);
  const ServiceId id = n->next_service_id++;
  n->services.emplace(id, CxiService{.id = id,
                                     .node = node,
                                     .member = member,
                                     .vnis = std::move(vnis),
                                     .max_endpoints = max_endpoints,
                                     .active_endpoints = 0});
  return id;
}

absl::Status Fabric::DeleteService(const NodeId& node, ServiceId id) {
  Node* n = FindNode(node);
  if (n == nullptr) return MakeError(ErrorKind::kUnknownNode, StrCat("unknown node ", node));
  std::lock_guard lock(n->mu);
  if (n->services.erase(id) == 0) {
    return MakeError(ErrorKind::kUnknownService,
                     StrCat("no service ", id, " on node ", node));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<CxiService>> Fabric::ListServices(const NodeId& node) const {
  Node* n = FindNode(node);
  if (n == nullptr) return MakeError(ErrorKind::kUnknownNode, StrCat("unknown node ", node));
  std::lock_guard lock(n->mu);
  std::vector<CxiService> out;
  out.reserve(n->services.size());
  for (const auto& [_, svc] : n->services) out.push_back(svc);
  return out;
}

absl::StatusOr<EndpointHandle> Fabric::AllocEndpoint(const NodeId& node, const ProcessContext& ctx,
                                                     Vni vni) {
  if (ctx.netns_inode == 0) {
    return absl::InvalidArgumentError("netns inode 0 is not a valid namespace");
  }
  Node* n = FindNode(node);
  if (n == nullptr) return MakeError(ErrorKind::kUnknownNode, StrCat("unknown node ", node));

  std::lock_guard lock(n->mu);
  bool quota_hit = false;
  for (auto& [id, svc] : n->services) {
    if (!svc.vnis.contains(vni) || !MemberMatches(svc.member, ctx)) continue;
    if (svc.max_endpoints.has_value() && svc.active_endpoints >= *svc.max_endpoints) {
      quota_hit = true;
      continue;
    }
    ++svc.active_endpoints;
    const EndpointId eid = n->next_endpoint_id++;
    n->endpoints.emplace(eid, Endpoint{.vni = vni, .service_id = id, .rx = {}});
    return EndpointHandle{.node = node, .endpoint_id = eid, .vni = vni, .service_id = id};
  }
  if (quota_hit) {
    return MakeError(ErrorKind::kEndpointQuotaExceeded,
                     StrCat("endpoint quota reached for VNI ", vni, " on ", node));
  }
  return MakeError(ErrorKind::kPermissionDenied,
                   StrCat("no CXI service on ", node, " grants VNI ", vni,
                                " to this process"));
}

absl::Status Fabric::FreeEndpoint(const EndpointHandle& handle) {
  Node* n = FindNode(handle.node);
  if (n == nullptr) {
    return MakeError(ErrorKind::kUnknownNode, StrCat("unknown node ", handle.node));
  }
  std::lock_guard lock(n->mu);
  auto it = n->endpoints.find(handle.endpoint_id);
  if (it == n->endpoints.end() || it->second.service_id != handle.service_id) {
    return absl::NotFoundError(StrCat("endpoint ", handle.endpoint_id, " is not live"));
  }
  if (auto svc = n->services.find(it->second.service_id); svc != n->services.end()) {
    --svc->second.active_endpoints;
  }
  n->endpoints.erase(it);
  return absl::OkStatus();
}

TransmitResult Fabric::Transmit(const EndpointHandle& src, const EndpointHandle& dst,
                                std::span<const std::byte> payload) {
  Node* sn = FindNode(src.node);
  Node* dn = FindNode(dst.node);
  if (sn == nullptr || dn == nullptr) return TransmitResult::Dropped(DropReason::kDeadEndpoint);

  std::unique_lock<std::mutex> first(sn->mu, std::defer_lock);
  std::unique_lock<std::mutex> second(dn->mu, std::defer_lock);
  if (sn == dn) {
    first.lock();
  } else {
    std::lock(first, second);
  }

  auto live = [](Node* n, const EndpointHandle& h) -> Endpoint* {
    auto it = n->endpoints.find(h.endpoint_id);
    if (it == n->endpoints.end()) return nullptr;
    if (it->second.service_id != h.service_id || it->second.vni != h.vni) return nullptr;
    return &it->second;
  };
  Endpoint* s = live(sn, src);
  Endpoint* d = live(dn, dst);
  if (s == nullptr || d == nullptr) return TransmitResult::Dropped(DropReason::kDeadEndpoint);
  if (!sn->services.contains(s->service_id) || !dn->services.contains(d->service_id)) {
    return TransmitResult::Dropped(DropReason::kNoService);
  }
  if (s->vni != d->vni) return TransmitResult::Dropped(DropReason::kVniMismatch);

  d->rx.emplace_back(payload.begin(), payload.end());
  return TransmitResult::Delivered();
}

std::vector<std::vector<std::byte>> Fabric::Receive(const EndpointHandle& handle) {
  Node* n = FindNode(handle.node);
  if (n == nullptr) return {};
  std::lock_guard lock(n->mu);
  auto it = n->endpoints.find(handle.endpoint_id);
  if (it == n->endpoints.end()) return {};
  return std::exchange(it->second.rx, {});
}

std::size_t Fabric::TotalServices() const {
  std::shared_lock lock(nodes_mu_);
  std::size_t total = 0;
  for (const auto& [_, n] : nodes_) {
    std::lock_guard node_lock(n->mu);
    total += n->services.size();
  }
  return total;
}

}  // namespace vnimesh::cxi
