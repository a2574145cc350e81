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

#ifndef VNIMESH_COMMON_HTTP_H_
#define VNIMESH_COMMON_HTTP_H_

#include <memory>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace vnimesh {

struct HostPort {
  std::string host;
  int port = 0;
};

// Accepts "http://host:port[/...]" or "host:port".
absl::StatusOr<HostPort> ParseHostPort(std::string_view url);

std::string MakeUrl(const HostPort& hp);

}  // namespace vnimesh

#endif  // VNIMESH_COMMON_HTTP_H_
