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

#ifndef VNIMESH_COMMON_ERRORS_H_
#define VNIMESH_COMMON_ERRORS_H_

#include <optional>
#include <string_view>

#include "absl/status/status.h"

namespace vnimesh {

// Domain error kinds. Each maps onto a canonical absl status code and is
// attached to the status as a payload so callers can tell apart kinds that
// share a canonical code (e.g. NotOwner and UsersRemain).
enum class ErrorKind {
  // cxi-sim
  kEmptyVniSet,
  kUnknownNode,
  kUnknownService,
  kPermissionDenied,
  kEndpointQuotaExceeded,
  // vni-store
  kPoolExhausted,
  kNotOwner,
  kNotAllocated,
  kUsersRemain,
  // vni-endpoint
  kClaimNotFound,
  kMalformedAnnotation,
  kMalformedRequest,
  // cluster-sim
  kDuplicate,
  kNotFound,
  kNonQuiescent,
  kWebhookUnavailable,
  // cni-plugin
  kVniUnavailable,
  kGracePeriodTooLong,
  kManagementApiUnreachable,
  kCxiUnreachable,
  // bench-harness
  kEnvironmentDown,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);
std::optional<ErrorKind> ErrorKindFromName(std::string_view name);

absl::Status MakeError(ErrorKind kind, std::string_view message);

// Returns the domain kind carried by `status`, or nullopt for OK statuses and
// statuses produced outside this project.
std::optional<ErrorKind> KindOf(const absl::Status& status);

inline bool Is(const absl::Status& status, ErrorKind kind) {
  return KindOf(status) == kind;
}

}  // namespace vnimesh

#endif  // VNIMESH_COMMON_ERRORS_H_
