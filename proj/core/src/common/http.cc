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

#include "vnimesh/common/http.h"

#include <charconv>

#include "absl/status/status.h"
#include "vnimesh/common/strings.h"

namespace vnimesh {

absl::StatusOr<HostPort> ParseHostPort(std::string_view url) {
  std::string_view rest = url;
  if (rest.starts_with("http://")) rest.remove_prefix(7);
  if (auto slash = rest.find('/'); slash != std::string_view::npos) rest = rest.substr(0, slash);
  auto colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    return absl::InvalidArgumentError(StrCat("expected host:port, got '", url, "'"));
  }
  HostPort hp;
  hp.host = std::string(rest.substr(0, colon));
  std::string_view port = rest.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), hp.port);
  if (ec != std::errc() || ptr != port.data() + port.size() || hp.port <= 0 || hp.port > 65535) {
    return absl::InvalidArgumentError(StrCat("bad port in '", url, "'"));
  }
  return hp;
}

std::string MakeUrl(const HostPort& hp) { return StrCat("http://", hp.host, ":", hp.port); }

}  // namespace vnimesh
