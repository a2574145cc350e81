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

#include "http_errors.h"

#include <optional>

#include "vnimesh/common/strings.h"

namespace vnimesh::internal {

int HttpStatusFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 200;
    case absl::StatusCode::kInvalidArgument:
      return 400;
    case absl::StatusCode::kPermissionDenied:
      return 403;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kFailedPrecondition:
      return 409;
    case absl::StatusCode::kResourceExhausted:
      return 429;
    case absl::StatusCode::kUnavailable:
      return 503;
    default:
      return 500;
  }
}

std::string ErrorBody(const absl::Status& status) {
  auto kind = KindOf(status);
  std::string name = kind ? std::string(ErrorKindName(*kind))
                          : std::string(absl::StatusCodeToString(status.code()));
  return nlohmann::json{{"error", name}, {"message", std::string(status.message())}}.dump();
}

void ReplyError(httplib::Response& res, const absl::Status& status) {
  res.status = HttpStatusFor(status);
  res.set_content(ErrorBody(status), "application/json");
}

void ReplyJson(httplib::Response& res, const nlohmann::json& body, int http_status) {
  res.status = http_status;
  res.set_content(body.dump(), "application/json");
}

absl::Status StatusFromReply(int http_status, const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  std::string message = StrCat("HTTP ", http_status);
  if (j.is_object()) {
    message = j.value("message", message);
    if (auto kind = ErrorKindFromName(j.value("error", "")); kind.has_value()) {
      return MakeError(*kind, message);
    }
  }
  switch (http_status) {
    case 400:
      return absl::InvalidArgumentError(message);
    case 403:
      return absl::PermissionDeniedError(message);
    case 404:
      return absl::NotFoundError(message);
    case 409:
      return absl::FailedPreconditionError(message);
    case 503:
      return absl::UnavailableError(message);
    default:
      return absl::InternalError(message);
  }
}

absl::Status TransportError(const httplib::Result& result, ErrorKind kind) {
  return MakeError(kind, StrCat("transport error: ", httplib::to_string(result.error())));
}

}  // namespace vnimesh::internal
