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

// cluster-sim run SCENARIO   replays a scenario and prints the end state
// cluster-sim serve          runs an idle wall-clock cluster with its APIs

#include <cstdio>
#include <fstream>
#include <thread>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "nlohmann/json.hpp"
#include "vnimesh/sim/json.h"
#include "vnimesh/sim/scenario.h"

namespace {

using vnimesh::sim::Environment;
using vnimesh::sim::EnvironmentOptions;

int Fail(const absl::Status& s) {
  fmt::print(stderr, "cluster-sim: {}\n", s.ToString());
  return 1;
}

nlohmann::json SummaryJson(const vnimesh::sim::EnvironmentSummary& s) {
  return {{"cluster", vnimesh::sim::ToJson(s.cluster)},
          {"vnisAllocated", s.vnis_allocated},
          {"vnisQuarantined", s.vnis_quarantined},
          {"cxiServices", s.cxi_services}};
}

int Main(int argc, char** argv) {
  CLI::App app{"Simulated Kubernetes control plane with the VNI integration"};
  app.require_subcommand(1);
  EnvironmentOptions opts;
  bool wall = false;
  bool http = false;
  std::string events_path;
  app.add_flag("--wall", wall, "Wall-clock time instead of virtual time");
  app.add_flag("--http", http, "Webhook, management API and CXI control over HTTP");
  app.add_option("--cni-binary", opts.cni_binary, "Execute this CNI plugin binary per call");
  app.add_option("--db", opts.store_path, "VNI database file (default in memory)");
  app.add_option("--quarantine", opts.quarantine_seconds, "VNI quarantine seconds");
  app.add_option("--events", events_path, "Append the phase-transition log (JSON lines)");

  std::string scenario_path;
  CLI::App* run = app.add_subcommand("run", "Replay a scenario file to quiescence");
  run->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
  CLI::App* serve = app.add_subcommand("serve", "Serve the APIs until killed");
  serve->add_option("--scenario", scenario_path, "Replay this scenario first");
  CLI11_PARSE(app, argc, argv);

  if (serve->parsed()) {
    wall = true;
    http = true;
  }
  opts.clock = wall ? vnimesh::sim::ClockMode::kWall : vnimesh::sim::ClockMode::kVirtual;
  if (http) {
    opts.webhook = vnimesh::sim::Transport::kHttp;
    opts.plugin = vnimesh::sim::Transport::kHttp;
  }
  std::optional<vnimesh::sim::Scenario> scenario;
  if (!scenario_path.empty()) {
    auto loaded = vnimesh::sim::LoadScenario(scenario_path);
    if (!loaded.ok()) return Fail(loaded.status());
    scenario = *std::move(loaded);
    vnimesh::sim::ApplyScenario(*scenario, opts);
  }
  auto env = Environment::Create(opts);
  if (!env.ok()) return Fail(env.status());

  std::ofstream events;
  std::unique_ptr<vnimesh::sim::JsonLinesWriter> writer;
  if (!events_path.empty()) {
    events.open(events_path, std::ios::app);
    if (!events) return Fail(absl::NotFoundError("cannot open " + events_path));
    writer = std::make_unique<vnimesh::sim::JsonLinesWriter>(events);
    (*env)->cluster().SetEventSink([w = writer.get()](const vnimesh::sim::Event& e) { (*w)(e); });
  }
  if (wall) (*env)->StartLoop();

  if (serve->parsed()) {
    fmt::print("webhook     {}\nmanagement  {}\ncxi control {}\n", (*env)->webhook_url(),
               (*env)->management_url(), (*env)->cxi_url());
    std::fflush(stdout);
    if (scenario) {
      if (auto s = vnimesh::sim::RunScenario(**env, *scenario); !s.ok()) return Fail(s.status());
    }
    while (true) std::this_thread::sleep_for(std::chrono::hours(1));
  }

  auto summary = vnimesh::sim::RunScenario(**env, *scenario);
  if (wall) (*env)->StopLoop();
  (*env)->cluster().SetEventSink(nullptr);
  if (!summary.ok()) return Fail(summary.status());
  fmt::print("{}\n", SummaryJson(*summary).dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return Main(argc, argv); }
