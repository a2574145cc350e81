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

// bench ramp|spike --mode vni|novni|both --runs N --out DIR [--seed S]
//
// Runs the admission experiments against a wall-clock cluster and writes
// jobs.csv, timeline.csv and summary.json to DIR. Exits 2 when an invariant
// check failed during the runs.

#include <cstdio>
#include <vector>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "vnimesh/bench/emit.h"
#include "vnimesh/bench/harness.h"

namespace {

using vnimesh::bench::Mode;

int Main(int argc, char** argv) {
  CLI::App app{"Admission-delay experiments with and without the VNI path"};
  app.require_subcommand(1);
  std::string mode_name = "both";
  std::uint32_t runs = 5;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::optional<double> quarantine;
  std::uint32_t spike_jobs = 500;
  vnimesh::bench::RampConfig ramp;
  vnimesh::bench::HarnessOptions options;
  bool http = false;

  for (CLI::App* sub : {app.add_subcommand("ramp", "Batches ramping 1..10, sustained, then down"),
                        app.add_subcommand("spike", "All jobs submitted at once")}) {
    sub->add_option("--mode", mode_name, "vni, novni or both (interleaved)")
        ->check(CLI::IsMember({"vni", "novni", "both"}));
    sub->add_option("--runs", runs, "Runs per mode")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--seed", seed, "Base seed; run r uses seed + r");
    sub->add_option("--quarantine", quarantine, "VNI quarantine seconds (ramp 30, spike 3)");
    sub->add_option("--nodes", options.nodes, "Simulated node names")->delimiter(',');
    sub->add_option("--admission-constant", options.admission.constant, "Per-pod start delay (s)");
    sub->add_option("--admission-jitter", options.admission.jitter, "Uniform extra delay (s)");
    sub->add_option("--node-start-interval", options.admission.node_start_interval,
                    "Minimum spacing of sandbox starts per node (s)");
    sub->add_option("--drain-timeout", options.drain_timeout_seconds, "Seconds to wait for a run to drain");
    sub->add_flag("--http", http, "Reach the webhook, management API and CXI control over HTTP");
    sub->add_option("--cni-binary", options.cni_binary, "Execute this CNI plugin binary per call");
  }
  app.get_subcommand("ramp")->add_option("--sustain", ramp.sustain_batches, "Batches at the peak");
  app.get_subcommand("ramp")->add_option("--peak", ramp.peak, "Largest batch");
  app.get_subcommand("ramp")->add_option("--interval", ramp.batch_interval, "Seconds between batches");
  app.get_subcommand("spike")->add_option("--jobs", spike_jobs, "Jobs submitted at once");
  CLI11_PARSE(app, argc, argv);

  const bool is_ramp = app.got_subcommand("ramp");
  options.seed = seed;
  options.quarantine_seconds = quarantine.value_or(is_ramp ? 30.0 : 3.0);
  if (http) {
    options.webhook = vnimesh::sim::Transport::kHttp;
    options.plugin = vnimesh::sim::Transport::kHttp;
  }
  ramp.runs = runs;
  auto plan = is_ramp ? vnimesh::bench::RampPlan(ramp)
                      : vnimesh::bench::SpikePlan({.job_count = spike_jobs, .runs = runs});
  if (!plan.ok()) {
    fmt::print(stderr, "bench: {}\n", plan.status().ToString());
    return 1;
  }
  std::vector<Mode> modes;
  if (mode_name != "novni") modes.push_back(Mode::kVni);
  if (mode_name != "vni") modes.push_back(Mode::kNoVni);

  options.on_run = [](const vnimesh::bench::RunRecord& run) {
    fmt::print(stderr, "run {} {:<5} {:4} jobs in {:7.2f} s, {} audit violations\n", run.run,
               vnimesh::bench::ModeName(run.mode), run.jobs.size(), run.duration,
               run.audit_violations.size());
  };
  auto result = vnimesh::bench::RunExperiment(*plan, modes, options);
  if (!result.ok()) {
    fmt::print(stderr, "bench: {}\n", result.status().ToString());
    return 1;
  }
  if (auto s = vnimesh::bench::Emit(*result, out_dir); !s.ok()) {
    fmt::print(stderr, "bench: {}\n", s.ToString());
    return 1;
  }
  for (Mode mode : modes) {
    const auto m = vnimesh::bench::Summarize(result->runs, mode, result->plan);
    fmt::print("{:<5} admission delay median {:.4f} s (p10 {:.4f}, p90 {:.4f}) over {} jobs\n",
               vnimesh::bench::ModeName(mode), m.admission_delay.median, m.admission_delay.p10,
               m.admission_delay.p90, m.jobs);
  }
  if (auto overhead = vnimesh::bench::RelativeOverhead(*result)) {
    fmt::print("relative overhead of the VNI path: {:.2f}%\n", *overhead * 100);
  }
  const auto violations = vnimesh::bench::CheckInvariants(*result);
  for (const auto& v : violations) fmt::print(stderr, "invariant: {}\n", v);
  return violations.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) { return Main(argc, argv); }
