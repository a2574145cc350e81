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

#include "vnimesh/bench/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "fmt/format.h"
#include "vnimesh/bench/audit_checker.h"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"
#include "vnimesh/endpoint/types.h"

namespace vnimesh::bench {

namespace {

constexpr char kNamespace[] = "bench";
constexpr double kAuditPollSeconds = 0.02;
constexpr double kTimelineGridSeconds = 0.25;
constexpr std::size_t kMaxReportedViolations = 20;

// Receives job events from the cluster (under its lock) and turns them into
// the active-jobs timeline on its own thread.
class TimelineConsumer {
 public:
  explicit TimelineConsumer(Timestamp t0) : t0_(t0), thread_([this] { Loop(); }) {}
  ~TimelineConsumer() { Finish(); }

  void Push(const sim::Event& e) {
    if (e.kind != sim::Kind::kJob) return;
    const bool created = !e.from.has_value();
    if (!created && e.to != sim::Phase::kDeleted) return;
    {
      std::lock_guard lock(mu_);
      queue_.push_back({e.t, created});
    }
    cv_.notify_one();
  }

  std::vector<TimelinePoint> Finish() {
    {
      std::lock_guard lock(mu_);
      done_ = true;
    }
    cv_.notify_one();
    if (thread_.joinable()) thread_.join();
    return std::move(timeline_);
  }

 private:
  struct Change {
    Timestamp t;
    bool created;
  };

  void Loop() {
    std::unique_lock lock(mu_);
    while (true) {
      cv_.wait(lock, [this] { return done_ || !queue_.empty(); });
      std::deque<Change> batch;
      batch.swap(queue_);
      const bool done = done_;
      lock.unlock();
      for (const Change& c : batch) {
        active_ = c.created ? active_ + 1 : active_ - 1;
        timeline_.push_back({std::max(0.0, c.t - t0_), active_});
      }
      lock.lock();
      if (done && queue_.empty()) return;
    }
  }

  const Timestamp t0_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Change> queue_;
  bool done_ = false;
  std::size_t active_ = 0;
  std::vector<TimelinePoint> timeline_;
  std::thread thread_;
};

// Tails the audit log while the run is in flight.
class Auditor {
 public:
  Auditor(store::VniStore& store, double quarantine)
      : store_(store), checker_(quarantine), thread_([this] { Loop(); }) {}

  const AuditChecker& Finish() {
    stop_ = true;
    if (thread_.joinable()) thread_.join();
    Poll();
    return checker_;
  }
  std::size_t polls() const { return polls_; }
  const std::string& error() const { return error_; }

 private:
  void Loop() {
    while (!stop_) {
      Poll();
      std::this_thread::sleep_for(std::chrono::duration<double>(kAuditPollSeconds));
    }
  }

  void Poll() {
    auto log = store_.AuditLog(checker_.last_seq());
    ++polls_;
    if (!log.ok()) {
      error_ = std::string(log.status().message());
      return;
    }
    for (const store::AuditRecord& rec : *log) checker_.Feed(rec);
  }

  store::VniStore& store_;
  AuditChecker checker_;
  std::atomic<bool> stop_{false};
  std::size_t polls_ = 0;
  std::string error_;
  std::thread thread_;
};

sim::ResourceObject MakeJob(std::string name, Mode mode) {
  sim::ResourceObject obj;
  obj.kind = sim::Kind::kJob;
  obj.meta.ns = kNamespace;
  obj.meta.name = std::move(name);
  if (mode == Mode::kVni) obj.meta.annotations.emplace("vni", "true");
  obj.job.pods = 1;
  obj.job.command = {"echo", "done"};
  obj.job.run_seconds = 0.0;
  obj.job.ttl_seconds_after_finished = 0.0;
  return obj;
}

}  // namespace

std::string_view ExperimentName(ExperimentKind kind) {
  return kind == ExperimentKind::kRamp ? "ramp" : "spike";
}

std::string_view ModeName(Mode mode) { return mode == Mode::kVni ? "vni" : "novni"; }

std::optional<Mode> ParseMode(std::string_view name) {
  if (name == "vni") return Mode::kVni;
  if (name == "novni") return Mode::kNoVni;
  return std::nullopt;
}

std::size_t Plan::jobs_per_run() const {
  std::size_t n = 0;
  for (std::uint32_t b : batches) n += b;
  return n;
}

absl::StatusOr<Plan> RampPlan(const RampConfig& cfg) {
  if (cfg.start < 1 || cfg.start > cfg.peak || cfg.step < 1 || cfg.runs < 1 ||
      !(cfg.batch_interval > 0)) {
    return MakeError(ErrorKind::kMalformedRequest,
                     "ramp needs 1 <= start <= peak, step >= 1, runs >= 1, interval > 0");
  }
  Plan plan{.kind = ExperimentKind::kRamp, .batch_interval = cfg.batch_interval, .runs = cfg.runs};
  for (std::uint32_t n = cfg.start; n < cfg.peak; n += cfg.step) plan.batches.push_back(n);
  plan.batches.push_back(cfg.peak);
  for (std::uint32_t i = 0; i < cfg.sustain_batches; ++i) plan.batches.push_back(cfg.peak);
  // The peak is not repeated on the way down.
  for (std::int64_t down = std::int64_t{cfg.peak} - cfg.step; down >= cfg.start; down -= cfg.step) {
    plan.batches.push_back(static_cast<std::uint32_t>(down));
  }
  return plan;
}

absl::StatusOr<Plan> SpikePlan(const SpikeConfig& cfg) {
  if (cfg.job_count < 1 || cfg.runs < 1) {
    return MakeError(ErrorKind::kMalformedRequest, "spike needs job_count >= 1 and runs >= 1");
  }
  return Plan{.kind = ExperimentKind::kSpike, .batches = {cfg.job_count}, .batch_interval = 0,
              .runs = cfg.runs};
}

absl::StatusOr<RunRecord> RunOnce(const Plan& plan, Mode mode, std::uint32_t run,
                                  const HarnessOptions& options) {
  sim::EnvironmentOptions eo;
  eo.clock = sim::ClockMode::kWall;
  eo.cluster.nodes = options.nodes;
  eo.cluster.admission = options.admission;
  eo.cluster.seed = options.seed + run;
  eo.vni_enabled = mode == Mode::kVni;
  eo.webhook = options.webhook;
  eo.plugin = options.plugin;
  eo.cni_binary = options.cni_binary;
  eo.quarantine_seconds = options.quarantine_seconds;
  auto created = sim::Environment::Create(std::move(eo));
  if (!created.ok()) {
    return MakeError(ErrorKind::kEnvironmentDown,
                     StrCat("environment: ", std::string(created.status().message())));
  }
  sim::Environment& env = **created;
  sim::Cluster& cluster = env.cluster();

  RunRecord rec{.mode = mode, .run = run, .seed = options.seed + run};
  const Timestamp t0 = env.clock().Now();
  TimelineConsumer timeline(t0);
  cluster.SetEventSink([&timeline](const sim::Event& e) { timeline.Push(e); });
  Auditor auditor(env.store(), options.quarantine_seconds);
  env.StartLoop();

  std::map<std::string, std::uint32_t> batch_of;
  absl::Status submit_error;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint32_t b = 0; b < plan.batches.size() && submit_error.ok(); ++b) {
    std::this_thread::sleep_until(
        start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(b * plan.batch_interval)));
    for (std::uint32_t i = 0; i < plan.batches[b]; ++i) {
      const std::string name =
          StrCat(ExperimentName(plan.kind), "-r", run, "-b", fmt::format("{:02}", b), "-",
                 fmt::format("{:03}", i));
      batch_of[endpoint::JobRef(kNamespace, name)] = b;
      if (auto uid = cluster.Submit(MakeJob(name, mode)); !uid.ok()) {
        submit_error = uid.status();
        break;
      }
    }
  }
  const bool drained = submit_error.ok() && env.WaitQuiescent(options.drain_timeout_seconds);
  env.StopLoop();
  rec.duration = env.clock().Now() - t0;
  cluster.SetEventSink(nullptr);
  rec.timeline = timeline.Finish();
  const AuditChecker& checker = auditor.Finish();
  if (!submit_error.ok()) return submit_error;
  if (!drained) {
    return MakeError(ErrorKind::kEnvironmentDown,
                     StrCat("run ", run, " (", ModeName(mode), ") did not drain within ",
                            options.drain_timeout_seconds, " s"));
  }
  if (!auditor.error().empty()) {
    return MakeError(ErrorKind::kEnvironmentDown, StrCat("auditor: ", auditor.error()));
  }
  rec.acquires = checker.acquires();
  rec.releases = checker.releases();
  rec.audit_violations = checker.violations();
  rec.auditor_polls = auditor.polls();
  rec.sync_calls = cluster.stats().sync_calls;
  auto summary = env.Summarize();
  if (!summary.ok()) return summary.status();
  rec.end_state = *summary;

  for (const sim::AdmissionRecord& a : cluster.AdmissionRecords()) {
    auto it = batch_of.find(a.job_ref);
    if (it == batch_of.end()) continue;
    if (!a.started_at || !a.completed_at || !a.deleted_at) {
      ++rec.incomplete_jobs;
      continue;
    }
    rec.jobs.push_back(JobRow{.job_ref = a.job_ref, .mode = mode, .run = run, .batch = it->second,
                              .submit = a.submitted_at - t0, .start = *a.started_at - t0,
                              .complete = *a.completed_at - t0, .deleted = *a.deleted_at - t0});
  }
  rec.incomplete_jobs += batch_of.size() - rec.jobs.size() - rec.incomplete_jobs;
  std::sort(rec.jobs.begin(), rec.jobs.end(), [](const JobRow& a, const JobRow& b) {
    return std::tie(a.batch, a.job_ref) < std::tie(b.batch, b.job_ref);
  });
  return rec;
}

absl::StatusOr<ExperimentResult> RunExperiment(const Plan& plan, std::span<const Mode> modes,
                                               const HarnessOptions& options) {
  ExperimentResult result{.plan = plan, .options = options};
  result.options.on_run = nullptr;
  for (std::uint32_t run = 0; run < plan.runs; ++run) {
    for (Mode mode : modes) {
      auto rec = RunOnce(plan, mode, run, options);
      if (!rec.ok()) return rec.status();
      if (options.on_run) options.on_run(*rec);
      result.runs.push_back(*std::move(rec));
    }
  }
  return result;
}

ModeSummary Summarize(std::span<const RunRecord> runs, Mode mode, const Plan& plan) {
  ModeSummary out{.mode = mode};
  std::vector<std::vector<double>> by_batch(plan.batches.size());
  std::vector<double> delays;
  std::vector<double> times;
  std::vector<const RunRecord*> mine;
  double horizon = 0;
  for (const RunRecord& run : runs) {
    if (run.mode != mode) continue;
    mine.push_back(&run);
    for (const JobRow& row : run.jobs) {
      if (row.batch < by_batch.size()) by_batch[row.batch].push_back(row.admission_delay());
      delays.push_back(row.admission_delay());
      times.push_back(row.job_time());
    }
    if (!run.timeline.empty()) horizon = std::max(horizon, run.timeline.back().t);
  }
  out.runs = mine.size();
  out.jobs = delays.size();
  if (mine.empty()) return out;

  for (std::uint32_t b = 0; b < by_batch.size(); ++b) {
    const Spread s = SpreadOf(by_batch[b]);
    out.per_batch_delay.push_back(
        {.batch = b, .submitted = plan.batches[b], .mean = Mean(by_batch[b]), .p10 = s.p10, .p90 = s.p90});
  }
  out.admission_delay = SpreadOf(delays);
  out.job_time = SpreadOf(times);

  const auto steps = static_cast<std::size_t>(horizon / kTimelineGridSeconds) + 2;
  std::vector<std::size_t> cursor(mine.size(), 0);
  std::vector<std::size_t> level(mine.size(), 0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * kTimelineGridSeconds;
    std::vector<double> counts;
    for (std::size_t r = 0; r < mine.size(); ++r) {
      const auto& tl = mine[r]->timeline;
      while (cursor[r] < tl.size() && tl[cursor[r]].t <= t) level[r] = tl[cursor[r]++].active;
      counts.push_back(static_cast<double>(level[r]));
    }
    const Spread s = SpreadOf(counts);
    out.active_jobs_timeline.push_back({.t = t, .median = s.median, .p10 = s.p10, .p90 = s.p90});
  }
  return out;
}

std::optional<double> RelativeOverhead(const ExperimentResult& result) {
  const ModeSummary vni = Summarize(result.runs, Mode::kVni, result.plan);
  const ModeSummary novni = Summarize(result.runs, Mode::kNoVni, result.plan);
  if (vni.jobs == 0 || novni.jobs == 0 || novni.admission_delay.median <= 0) return std::nullopt;
  return (vni.admission_delay.median - novni.admission_delay.median) / novni.admission_delay.median;
}

std::vector<std::string> CheckInvariants(const ExperimentResult& result) {
  std::vector<std::string> out;
  const std::size_t expected = result.plan.jobs_per_run();
  for (const RunRecord& run : result.runs) {
    const std::string tag = StrCat("run ", run.run, " (", ModeName(run.mode), "): ");
    for (std::size_t i = 0; i < run.audit_violations.size() && i < kMaxReportedViolations; ++i) {
      out.push_back(tag + run.audit_violations[i]);
    }
    if (run.jobs.size() != expected || run.incomplete_jobs != 0) {
      out.push_back(StrCat(tag, run.jobs.size(), " of ", expected, " jobs completed, ",
                           run.incomplete_jobs, " incomplete"));
    }
    const auto& end = run.end_state;
    if (end.cluster.jobs_live != 0 || end.cluster.vnicrds != 0) {
      out.push_back(StrCat(tag, end.cluster.jobs_live, " jobs and ", end.cluster.vnicrds,
                           " VniCrds left at the end"));
    }
    if (end.vnis_allocated != 0) out.push_back(StrCat(tag, end.vnis_allocated, " VNIs still allocated"));
    if (end.cxi_services != 0) out.push_back(StrCat(tag, end.cxi_services, " CXI services left"));
    const std::size_t want = run.mode == Mode::kVni ? expected : 0;
    if (run.acquires != want || run.releases != want) {
      out.push_back(StrCat(tag, run.acquires, " Acquire and ", run.releases,
                           " Release records, expected ", want, " each"));
    }
    if (run.mode == Mode::kNoVni && run.sync_calls != 0) {
      out.push_back(StrCat(tag, run.sync_calls, " /sync calls with the VNI path disabled"));
    }
    if (!run.timeline.empty() && run.timeline.back().active != 0) {
      out.push_back(StrCat(tag, "timeline ends with ", run.timeline.back().active, " active jobs"));
    }
    if (result.plan.kind == ExperimentKind::kSpike) {
      std::vector<std::size_t> counts;
      for (const TimelinePoint& p : run.timeline) counts.push_back(p.active);
      if (!IsSinglePeaked(counts)) out.push_back(tag + "active-jobs timeline is not single-peaked");
    }
  }
  return out;
}

}  // namespace vnimesh::bench
