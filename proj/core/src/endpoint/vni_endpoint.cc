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

#include "vnimesh/endpoint/vni_endpoint.h"

#include <utility>

#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::endpoint {
namespace {

ParentStatus Failed(const absl::Status& status) {
  ParentStatus s;
  s.phase = "Failed";
  if (auto kind = KindOf(status)) s.reason = std::string(ErrorKindName(*kind));
  s.message = std::string(status.message());
  return s;
}

ParentStatus Bound(Vni vni) {
  ParentStatus s;
  s.phase = "Bound";
  s.vni = vni;
  return s;
}

ParentStatus Released() {
  ParentStatus s;
  s.phase = "Released";
  return s;
}

VniCrd OwningChild(const Parent& parent, Vni vni) {
  VniCrd crd{.name = ChildName(parent.name), .ns = parent.ns, .vni = vni, .owning = true,
             .claim_name = std::nullopt};
  if (parent.kind == ParentKind::kVniClaim) crd.claim_name = parent.name;
  return crd;
}

VniCrd VirtualChild(const Parent& parent, const std::string& claim, Vni vni) {
  return VniCrd{.name = ChildName(parent.name), .ns = parent.ns, .vni = vni, .owning = false,
                .claim_name = claim};
}

}  // namespace

absl::StatusOr<SyncResponse> VniEndpoint::HandleSync(const SyncRequest& req, Timestamp now) {
  const Parent& parent = req.parent;
  if (parent.kind == ParentKind::kVniClaim) {
    return SyncOwner(parent, ClaimRef(parent.ns, parent.name), now);
  }

  auto request = ParseVniAnnotation(parent.annotations);
  if (!request.ok()) return SyncResponse{{}, Failed(request.status())};
  if (!request->has_value()) {
    return SyncResponse{{}, Failed(MakeError(ErrorKind::kMalformedAnnotation,
                                             "job carries no vni annotation"))};
  }
  if ((*request)->model == VniRequest::Model::kPerResource) {
    return SyncOwner(parent, JobRef(parent.ns, parent.name), now);
  }
  return SyncClaimUser(parent, (*request)->claim_name);
}

absl::StatusOr<SyncResponse> VniEndpoint::SyncOwner(const Parent& parent, const std::string& owner,
                                                    Timestamp now) {
  auto vni = store_.Acquire(owner, now);
  if (!vni.ok()) {
    if (!KindOf(vni.status())) return vni.status();
    return SyncResponse{{}, Failed(vni.status())};
  }
  return SyncResponse{{OwningChild(parent, *vni)}, Bound(*vni)};
}

absl::StatusOr<SyncResponse> VniEndpoint::SyncClaimUser(const Parent& parent,
                                                        const std::string& claim) {
  auto vni = store_.AddUserToOwnedVni(ClaimRef(parent.ns, claim), JobRef(parent.ns, parent.name));
  if (!vni.ok()) return vni.status();
  if (!vni->has_value()) {
    return SyncResponse{{}, Failed(MakeError(ErrorKind::kClaimNotFound,
                                             StrCat("no VNI claim '", claim, "' in namespace ",
                                                    parent.ns)))};
  }
  return SyncResponse{{VirtualChild(parent, claim, **vni)}, Bound(**vni)};
}

absl::StatusOr<FinalizeResponse> VniEndpoint::HandleFinalize(const SyncRequest& req,
                                                             Timestamp now) {
  const Parent& parent = req.parent;
  if (parent.kind == ParentKind::kVniClaim) return FinalizeClaim(req, now);

  auto request = ParseVniAnnotation(parent.annotations);
  if (!request.ok() || !request->has_value()) return FinalizeResponse{true, {}, Released()};
  if ((*request)->model == VniRequest::Model::kPerResource) return FinalizeOwningJob(parent, now);
  return FinalizeClaimUser(req, (*request)->claim_name);
}

absl::StatusOr<FinalizeResponse> VniEndpoint::FinalizeOwningJob(const Parent& parent,
                                                                Timestamp now) {
  const std::string owner = JobRef(parent.ns, parent.name);
  auto vni = store_.LookupOwner(owner);
  if (!vni.ok()) return vni.status();
  if (vni->has_value()) {
    absl::Status released = store_.Release(**vni, owner, now);
    // NotAllocated/NotOwner mean a concurrent finalize already released it.
    if (!released.ok() && !KindOf(released)) return released;
  }
  return FinalizeResponse{true, {}, Released()};
}

absl::StatusOr<FinalizeResponse> VniEndpoint::FinalizeClaimUser(const SyncRequest& req,
                                                                const std::string& claim) {
  const std::string user = JobRef(req.parent.ns, req.parent.name);
  // The virtual child records which VNI this job was bound to; fall back to
  // the claim's current VNI when the child was never created.
  std::optional<Vni> vni;
  for (const auto& child : req.children) {
    if (!child.owning) vni = child.vni;
  }
  if (!vni) {
    auto owned = store_.LookupOwner(ClaimRef(req.parent.ns, claim));
    if (!owned.ok()) return owned.status();
    vni = *owned;
  }
  if (vni) {
    auto left = store_.RemoveUser(*vni, user);
    if (!left.ok() && !KindOf(left.status())) return left.status();
  }
  return FinalizeResponse{true, {}, Released()};
}

absl::StatusOr<FinalizeResponse> VniEndpoint::FinalizeClaim(const SyncRequest& req,
                                                            Timestamp now) {
  const Parent& parent = req.parent;
  const std::string owner = ClaimRef(parent.ns, parent.name);
  auto vni = store_.LookupOwner(owner);
  if (!vni.ok()) return vni.status();
  if (!vni->has_value()) return FinalizeResponse{true, {}, Released()};

  auto stalled = [&](std::size_t users) {
    ParentStatus s;
    s.phase = "Terminating";
    s.vni = **vni;
    s.users = users;
    s.message = StrCat("waiting for ", users, " job(s) using this claim to terminate");
    return FinalizeResponse{false, {OwningChild(parent, **vni)}, std::move(s)};
  };

  auto record = store_.Get(**vni);
  if (!record.ok()) return record.status();
  if (!record->users.empty()) return stalled(record->users.size());

  absl::Status released = store_.Release(**vni, owner, now);
  if (Is(released, ErrorKind::kUsersRemain)) {
    auto again = store_.Get(**vni);
    if (!again.ok()) return again.status();
    return stalled(again->users.size());
  }
  if (!released.ok() && !KindOf(released)) return released;
  return FinalizeResponse{true, {}, Released()};
}

}  // namespace vnimesh::endpoint
