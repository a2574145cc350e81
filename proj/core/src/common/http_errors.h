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

#ifndef VNIMESH_SRC_COMMON_HTTP_ERRORS_H_
#define VNIMESH_SRC_COMMON_HTTP_ERRORS_H_

#include <string>

#include "absl/status/status.h"
#include "httplib.h"
#include "nlohmann/json.hpp"
#include "vnimesh/common/errors.h"

namespace vnimesh::internal {

int HttpStatusFor(const absl::Status& status);

// {"error": "<kind or canonical code>", "message": "..."}
std::string ErrorBody(const absl::Status& status);

void ReplyError(httplib::Response& res, const absl::Status& status);
void ReplyJson(httplib::Response& res, const nlohmann::json& body, int http_status = 200);

// Inverse of ErrorBody: rebuilds the domain error (kind payload included).
absl::Status StatusFromReply(int http_status, const std::string& body);

// Maps a transport failure onto an unavailable status tagged with `kind`.
absl::Status TransportError(const httplib::Result& result, ErrorKind kind);

}  // namespace vnimesh::internal

#endif  // VNIMESH_SRC_COMMON_HTTP_ERRORS_H_
