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

#ifndef VNIMESH_BENCH_HARNESS_H_
#define VNIMESH_BENCH_HARNESS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "vnimesh/bench/stats.h"
#include "vnimesh/sim/environment.h"

namespace vnimesh::bench {

enum class ExperimentKind { kRamp, kSpike };
std::string_view ExperimentName(ExperimentKind kind);  // "ramp" | "spike"

// kVni annotates every job and routes it through the VNI endpoint; kNoVni
// submits unannotated jobs and bypasses the endpoint.
enum class Mode { kVni, kNoVni };
std::string_view ModeName(Mode mode);  // "vni" | "novni"
std::optional<Mode> ParseMode(std::string_view name);

// Batches of start, start+step, ..., peak jobs, then `sustain_batches`
// batches of peak, then back down to start, one batch per interval.
struct RampConfig {
  std::uint32_t start = 1;
  std::uint32_t peak = 10;
  std::uint32_t step = 1;
  std::uint32_t sustain_batches = 10;
  double batch_interval = 1.0;
  std::uint32_t runs = 5;
};

struct SpikeConfig {
  std::uint32_t job_count = 500;
  std::uint32_t runs = 5;
};

// What one run submits: batches[i] jobs at i * batch_interval.
struct Plan {
  ExperimentKind kind = ExperimentKind::kRamp;
  std::vector<std::uint32_t> batches;
  double batch_interval = 1.0;
  std::uint32_t runs = 1;

  std::size_t jobs_per_run() const;
};

absl::StatusOr<Plan> RampPlan(const RampConfig& cfg);
absl::StatusOr<Plan> SpikePlan(const SpikeConfig& cfg);

struct RunRecord;

struct HarnessOptions {
  std::uint64_t seed = 1;
  std::vector<NodeId> nodes = {"n0", "n1"};
  sim::AdmissionCost admission;
  double quarantine_seconds = 30;
  // A run that has not drained this long after its last submission fails
  // with EnvironmentDown.
  double drain_timeout_seconds = 300;
  sim::Transport webhook = sim::Transport::kInProcess;
  sim::Transport plugin = sim::Transport::kInProcess;
  std::string cni_binary;
  // Called after every finished run.
  std::function<void(const RunRecord&)> on_run;
};

// Times are seconds since the run's first submission.
struct JobRow {
  std::string job_ref;
  Mode mode = Mode::kVni;
  std::uint32_t run = 0;
  std::uint32_t batch = 0;
  double submit = 0;
  double start = 0;
  double complete = 0;
  double deleted = 0;

  double admission_delay() const { return start - submit; }
  double job_time() const { return deleted - submit; }
  friend bool operator==(const JobRow&, const JobRow&) = default;
};

struct TimelinePoint {
  double t = 0;
  std::size_t active = 0;
  friend bool operator==(const TimelinePoint&, const TimelinePoint&) = default;
};

struct RunRecord {
  Mode mode = Mode::kVni;
  std::uint32_t run = 0;
  std::uint64_t seed = 0;
  std::vector<JobRow> jobs;  // ordered by batch, then job_ref
  // Jobs whose admission record never completed; they have no row.
  std::size_t incomplete_jobs = 0;
  // Jobs submitted and not yet deleted, after every change.
  std::vector<TimelinePoint> timeline;
  std::size_t acquires = 0;
  std::size_t releases = 0;
  std::size_t sync_calls = 0;
  std::size_t auditor_polls = 0;
  std::vector<std::string> audit_violations;
  sim::EnvironmentSummary end_state;
  double duration = 0;
};

struct ExperimentResult {
  Plan plan;
  HarnessOptions options;
  std::vector<RunRecord> runs;  // execution order
};

// One run in a fresh wall-clock environment.
absl::StatusOr<RunRecord> RunOnce(const Plan& plan, Mode mode, std::uint32_t run,
                                  const HarnessOptions& options);

// All runs of `plan` for every mode. Modes alternate run by run, and run r
// of every mode uses seed + r.
absl::StatusOr<ExperimentResult> RunExperiment(const Plan& plan, std::span<const Mode> modes,
                                               const HarnessOptions& options);

struct BatchDelay {
  std::uint32_t batch = 0;
  std::uint32_t submitted = 0;  // per run
  double mean = 0;
  double p10 = 0;
  double p90 = 0;
};

struct ActivePoint {
  double t = 0;
  double median = 0;
  double p10 = 0;
  double p90 = 0;
};

struct ModeSummary {
  Mode mode = Mode::kVni;
  std::size_t runs = 0;
  std::size_t jobs = 0;
  std::vector<BatchDelay> per_batch_delay;
  Spread admission_delay;
  Spread job_time;
  // Per-run active-job counts sampled on a fixed grid.
  std::vector<ActivePoint> active_jobs_timeline;
};

ModeSummary Summarize(std::span<const RunRecord> runs, Mode mode, const Plan& plan);

// (median_vni - median_novni) / median_novni over pooled admission delays.
// nullopt unless both modes ran.
std::optional<double> RelativeOverhead(const ExperimentResult& result);

// Per-run invariant failures: auditor violations, unfinished or undeleted
// jobs, leftover VNIs or CXI services, Acquire/Release counts that differ
// from the job count (kVni) or zero (kNoVni), /sync calls in kNoVni, and for
// spikes a timeline that is not single-peaked. Empty when everything holds.
std::vector<std::string> CheckInvariants(const ExperimentResult& result);

}  // namespace vnimesh::bench

#endif  // VNIMESH_BENCH_HARNESS_H_
