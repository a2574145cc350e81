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

#ifndef VNIMESH_ENDPOINT_VNI_ENDPOINT_H_
#define VNIMESH_ENDPOINT_VNI_ENDPOINT_H_

#include "absl/status/statusor.h"
#include "vnimesh/common/clock.h"
#include "vnimesh/endpoint/types.h"
#include "vnimesh/store/vni_store.h"

namespace vnimesh::endpoint {

// Translates controller webhook calls into VNI database transactions and
// answers with the desired children (apply semantics). Stateless: every
// decision is derived from the request and the store.
//
// Ownership models, selected by the parent's `vni` annotation:
//   Job, vni: "true"       -> the job owns a fresh VNI (owning child)
//   VniClaim               -> the claim owns a fresh VNI (owning child)
//   Job, vni: <claim-name> -> the job becomes a user of the claim's VNI
//                             (non-owning child)
//
// Domain failures (ClaimNotFound, PoolExhausted, MalformedAnnotation) are
// reported in the response status with no children. A non-OK StatusOr means
// the store itself failed and the controller should retry.
class VniEndpoint {
 public:
  explicit VniEndpoint(store::VniStore& store) : store_(store) {}

  absl::StatusOr<SyncResponse> HandleSync(const SyncRequest& req, Timestamp now);
  absl::StatusOr<FinalizeResponse> HandleFinalize(const SyncRequest& req, Timestamp now);

  store::VniStore& store() { return store_; }

 private:
  absl::StatusOr<SyncResponse> SyncOwner(const Parent& parent, const std::string& owner,
                                         Timestamp now);
  absl::StatusOr<SyncResponse> SyncClaimUser(const Parent& parent, const std::string& claim);

  absl::StatusOr<FinalizeResponse> FinalizeOwningJob(const Parent& parent, Timestamp now);
  absl::StatusOr<FinalizeResponse> FinalizeClaimUser(const SyncRequest& req,
                                                     const std::string& claim);
  absl::StatusOr<FinalizeResponse> FinalizeClaim(const SyncRequest& req, Timestamp now);

  store::VniStore& store_;
};

}  // namespace vnimesh::endpoint

#endif  // VNIMESH_ENDPOINT_VNI_ENDPOINT_H_
