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

// vni-endpoint serve: the /sync and /finalize webhooks over HTTP.

#include <cstdio>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "vnimesh/common/clock.h"
#include "vnimesh/endpoint/vni_endpoint.h"
#include "vnimesh/endpoint/webhook.h"
#include "vnimesh/store/vni_store.h"

int main(int argc, char** argv) {
  CLI::App app{"VNI endpoint webhooks"};
  app.require_subcommand(1);
  CLI::App* serve = app.add_subcommand("serve", "Serve POST /sync and POST /finalize");
  vnimesh::store::StoreOptions opts;
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--db", opts.path, "SQLite database file")->required();
  serve->add_option("--quarantine", opts.quarantine.duration_seconds, "Quarantine seconds");
  serve->add_option("--host", host);
  serve->add_option("--port", port, "0 picks a free port");
  CLI11_PARSE(app, argc, argv);

  auto store = vnimesh::store::VniStore::Open(opts);
  if (!store.ok()) {
    fmt::print(stderr, "vni-endpoint: {}\n", store.status().ToString());
    return 1;
  }
  vnimesh::WallClock clock;
  vnimesh::endpoint::VniEndpoint endpoint(**store);
  vnimesh::endpoint::WebhookServer server(endpoint, clock);
  auto bound = server.Start(host, port);
  if (!bound.ok()) {
    fmt::print(stderr, "vni-endpoint: {}\n", bound.status().ToString());
    return 1;
  }
  fmt::print("listening on http://{}:{}\n", host, *bound);
  std::fflush(stdout);
  server.Wait();
  return 0;
}
