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

// cxi-sim serve: simulated CXI NICs with an HTTP service-registry API.

#include <cstdio>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "vnimesh/cxi/control.h"
#include "vnimesh/cxi/fabric.h"

int main(int argc, char** argv) {
  CLI::App app{"Simulated CXI fabric"};
  app.require_subcommand(1);
  CLI::App* serve = app.add_subcommand("serve", "Serve the per-node service registries");
  std::vector<std::string> nodes = {"n0", "n1"};
  std::string host = "127.0.0.1";
  int port = 8081;
  serve->add_option("--nodes", nodes, "Node names")->delimiter(',');
  serve->add_option("--host", host);
  serve->add_option("--port", port, "0 picks a free port");
  CLI11_PARSE(app, argc, argv);

  vnimesh::cxi::Fabric fabric;
  for (const auto& node : nodes) fabric.AddNode(node);
  vnimesh::cxi::ManagementServer server(fabric);
  auto bound = server.Start(host, port);
  if (!bound.ok()) {
    fmt::print(stderr, "cxi-sim: {}\n", bound.status().ToString());
    return 1;
  }
  fmt::print("listening on http://{}:{}\n", host, *bound);
  std::fflush(stdout);
  server.Wait();
  return 0;
}
