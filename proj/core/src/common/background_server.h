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

#ifndef VNIMESH_SRC_COMMON_BACKGROUND_SERVER_H_
#define VNIMESH_SRC_COMMON_BACKGROUND_SERVER_H_

#include <string>
#include <thread>

#include "absl/status/statusor.h"
#include "httplib.h"

namespace vnimesh::internal {

// Owns an httplib server and the thread running its accept loop.
class BackgroundServer {
 public:
  BackgroundServer() = default;
  ~BackgroundServer() { Stop(); }

  BackgroundServer(const BackgroundServer&) = delete;
  BackgroundServer& operator=(const BackgroundServer&) = delete;

  httplib::Server& server() { return server_; }

  // Port 0 binds an ephemeral port. Returns the bound port.
  absl::StatusOr<int> Start(const std::string& host, int port);
  void Stop();
  // Blocks until Stop() is called from another thread.
  void Wait();

  int port() const { return port_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace vnimesh::internal

#endif  // VNIMESH_SRC_COMMON_BACKGROUND_SERVER_H_
