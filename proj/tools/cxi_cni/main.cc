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

// Chained CNI plugin. Reads the CNI_* environment and the network
// configuration on stdin, prints the result (or error object) on stdout.

#include <iostream>
#include <iterator>
#include <string>

#include "vnimesh/cni/plugin.h"

extern char** environ;

int main() {
  vnimesh::cni::Invocation inv;
  for (char** e = environ; e && *e; ++e) {
    std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    inv.env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  inv.stdin_data.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  const vnimesh::cni::Outcome out = vnimesh::cni::Run(inv);
  std::cout << out.stdout_data;
  std::cout.flush();
  return out.exit_code;
}
