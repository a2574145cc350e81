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

#include "background_server.h"

#include "absl/status/status.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::internal {

absl::StatusOr<int> BackgroundServer::Start(const std::string& host, int port) {
  if (thread_.joinable()) return absl::FailedPreconditionError("server already running");
  if (port == 0) {
    port_ = server_.bind_to_any_port(host);
    if (port_ < 0) port_ = 0;
  } else {
    port_ = server_.bind_to_port(host, port) ? port : 0;
  }
  if (port_ == 0) {
    return absl::UnavailableError(StrCat("cannot bind ", host, ":", port));
  }
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
  return port_;
}

void BackgroundServer::Stop() {
  server_.stop();
  if (thread_.joinable()) thread_.join();
}

void BackgroundServer::Wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace vnimesh::internal
