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

#include "vnimesh/common/errors.h"

#include <array>
#include <utility>

#include "absl/strings/cord.h"

namespace vnimesh {
namespace {

constexpr const char* kPayloadUrl = "type.vnimesh.dev/ErrorKind";

struct KindInfo {
  ErrorKind kind;
  std::string_view name;
  absl::StatusCode code;
};

constexpr std::array kKinds = {
    KindInfo{ErrorKind::kEmptyVniSet, "EmptyVniSet", absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kUnknownNode, "UnknownNode", absl::StatusCode::kNotFound},
    KindInfo{ErrorKind::kUnknownService, "UnknownService", absl::StatusCode::kNotFound},
    KindInfo{ErrorKind::kPermissionDenied, "PermissionDenied", absl::StatusCode::kPermissionDenied},
    KindInfo{ErrorKind::kEndpointQuotaExceeded, "EndpointQuotaExceeded",
             absl::StatusCode::kResourceExhausted},
    KindInfo{ErrorKind::kPoolExhausted, "PoolExhausted", absl::StatusCode::kResourceExhausted},
    KindInfo{ErrorKind::kNotOwner, "NotOwner", absl::StatusCode::kPermissionDenied},
    KindInfo{ErrorKind::kNotAllocated, "NotAllocated", absl::StatusCode::kFailedPrecondition},
    KindInfo{ErrorKind::kUsersRemain, "UsersRemain", absl::StatusCode::kFailedPrecondition},
    KindInfo{ErrorKind::kClaimNotFound, "ClaimNotFound", absl::StatusCode::kNotFound},
    KindInfo{ErrorKind::kMalformedAnnotation, "MalformedAnnotation",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kMalformedRequest, "MalformedRequest", absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kDuplicate, "Duplicate", absl::StatusCode::kAlreadyExists},
    KindInfo{ErrorKind::kNotFound, "NotFound", absl::StatusCode::kNotFound},
    KindInfo{ErrorKind::kNonQuiescent, "NonQuiescent", absl::StatusCode::kDeadlineExceeded},
    KindInfo{ErrorKind::kWebhookUnavailable, "WebhookUnavailable",
             absl::StatusCode::kUnavailable},
    KindInfo{ErrorKind::kVniUnavailable, "VniUnavailable", absl::StatusCode::kUnavailable},
    KindInfo{ErrorKind::kGracePeriodTooLong, "GracePeriodTooLong",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kManagementApiUnreachable, "ManagementApiUnreachable",
             absl::StatusCode::kUnavailable},
    KindInfo{ErrorKind::kCxiUnreachable, "CxiUnreachable", absl::StatusCode::kUnavailable},
    KindInfo{ErrorKind::kEnvironmentDown, "EnvironmentDown", absl::StatusCode::kUnavailable},
    KindInfo{ErrorKind::kIo, "Io", absl::StatusCode::kInternal},
};

const KindInfo& Info(ErrorKind kind) {
  for (const auto& info : kKinds) {
    if (info.kind == kind) return info;
  }
  return kKinds.back();
}

}  // namespace

std::string_view ErrorKindName(ErrorKind kind) { return Info(kind).name; }

std::optional<ErrorKind> ErrorKindFromName(std::string_view name) {
  for (const auto& info : kKinds) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

absl::Status MakeError(ErrorKind kind, std::string_view message) {
  const KindInfo& info = Info(kind);
  absl::Status status(info.code, std::string(message));
  status.SetPayload(kPayloadUrl, absl::Cord(std::string(info.name)));
  return status;
}

std::optional<ErrorKind> KindOf(const absl::Status& status) {
  if (status.ok()) return std::nullopt;
  auto payload = status.GetPayload(kPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  return ErrorKindFromName(std::string(*payload));
}

}  // namespace vnimesh
