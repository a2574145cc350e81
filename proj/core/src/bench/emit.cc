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

#include "vnimesh/bench/emit.h"

#include <fstream>
#include <sstream>

#include "fmt/format.h"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::bench {

using nlohmann::ordered_json;

namespace {

constexpr char kJobsHeader[] = "job_ref,mode,submit,start,complete,delete,run,batch";

// Fixed precision keeps the output byte-stable and JSON numbers short.
double Round6(double v) { return std::stod(fmt::format("{:.6f}", v)); }

ordered_json SpreadJson(const Spread& s) {
  return {{"median", Round6(s.median)}, {"p10", Round6(s.p10)}, {"p90", Round6(s.p90)}};
}

ordered_json ModeJson(const ModeSummary& m) {
  ordered_json batches = ordered_json::array();
  for (const BatchDelay& b : m.per_batch_delay) {
    batches.push_back({{"batch", b.batch}, {"submitted", b.submitted}, {"mean", Round6(b.mean)},
                       {"p10", Round6(b.p10)}, {"p90", Round6(b.p90)}});
  }
  ordered_json timeline = ordered_json::array();
  for (const ActivePoint& p : m.active_jobs_timeline) {
    timeline.push_back({{"t", Round6(p.t)}, {"count", Round6(p.median)}, {"p10", Round6(p.p10)},
                        {"p90", Round6(p.p90)}});
  }
  return {{"mode", ModeName(m.mode)},
          {"runs", m.runs},
          {"jobs", m.jobs},
          {"admissionDelay", SpreadJson(m.admission_delay)},
          {"jobTime", SpreadJson(m.job_time)},
          {"perBatchDelay", std::move(batches)},
          {"activeJobsTimeline", std::move(timeline)}};
}

std::vector<Mode> ModesIn(const ExperimentResult& result) {
  std::vector<Mode> modes;
  for (const RunRecord& run : result.runs) {
    if (std::find(modes.begin(), modes.end(), run.mode) == modes.end()) modes.push_back(run.mode);
  }
  return modes;
}

absl::Status WriteFile(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
  out.close();
  if (!out) return MakeError(ErrorKind::kIo, StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

}  // namespace

std::string JobsCsv(const ExperimentResult& result) {
  std::string out = StrCat(kJobsHeader, "\n");
  for (const RunRecord& run : result.runs) {
    for (const JobRow& r : run.jobs) {
      out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", r.job_ref, ModeName(r.mode),
                         r.submit, r.start, r.complete, r.deleted, r.run, r.batch);
    }
  }
  return out;
}

std::string TimelineCsv(const ExperimentResult& result) {
  std::string out = "mode,run,t,active\n";
  for (const RunRecord& run : result.runs) {
    for (const TimelinePoint& p : run.timeline) {
      out += fmt::format("{},{},{:.6f},{}\n", ModeName(run.mode), run.run, p.t, p.active);
    }
  }
  return out;
}

ordered_json SummaryJson(const ExperimentResult& result) {
  const HarnessOptions& o = result.options;
  ordered_json modes = ordered_json::object();
  for (Mode mode : ModesIn(result)) {
    modes[std::string(ModeName(mode))] = ModeJson(Summarize(result.runs, mode, result.plan));
  }
  ordered_json runs = ordered_json::array();
  for (const RunRecord& run : result.runs) {
    runs.push_back({{"mode", ModeName(run.mode)},
                    {"run", run.run},
                    {"seed", run.seed},
                    {"jobs", run.jobs.size()},
                    {"acquires", run.acquires},
                    {"releases", run.releases},
                    {"syncCalls", run.sync_calls},
                    {"auditViolations", run.audit_violations.size()},
                    {"vnisAllocated", run.end_state.vnis_allocated},
                    {"cxiServices", run.end_state.cxi_services}});
  }
  const auto overhead = RelativeOverhead(result);
  const auto violations = CheckInvariants(result);
  return {{"experiment", ExperimentName(result.plan.kind)},
          {"seed", o.seed},
          {"runs", result.plan.runs},
          {"jobsPerRun", result.plan.jobs_per_run()},
          {"batches", result.plan.batches},
          {"batchInterval", result.plan.batch_interval},
          {"quarantineSeconds", o.quarantine_seconds},
          {"admissionCost",
           {{"constant", o.admission.constant},
            {"jitter", o.admission.jitter},
            {"nodeStartInterval", o.admission.node_start_interval}}},
          {"nodes", o.nodes},
          {"modes", std::move(modes)},
          {"relativeOverhead", overhead ? ordered_json(Round6(*overhead)) : ordered_json(nullptr)},
          {"invariantViolations", violations},
          {"perRun", std::move(runs)}};
}

absl::Status Emit(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return MakeError(ErrorKind::kIo, StrCat("cannot create ", dir.string(), ": ", ec.message()));
  if (auto s = WriteFile(dir / "jobs.csv", JobsCsv(result)); !s.ok()) return s;
  if (auto s = WriteFile(dir / "timeline.csv", TimelineCsv(result)); !s.ok()) return s;
  return WriteFile(dir / "summary.json", SummaryJson(result).dump(2) + "\n");
}

absl::StatusOr<std::vector<JobRow>> ParseJobsCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kJobsHeader) {
    return MakeError(ErrorKind::kMalformedRequest, "jobs.csv: unexpected header");
  }
  std::vector<JobRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream fields(line);
    for (std::string cell; std::getline(fields, cell, ',');) f.push_back(cell);
    auto mode = f.size() == 8 ? ParseMode(f[1]) : std::nullopt;
    if (!mode) return MakeError(ErrorKind::kMalformedRequest, StrCat("jobs.csv: bad row '", line, "'"));
    try {
      rows.push_back(JobRow{.job_ref = f[0], .mode = *mode,
                            .run = static_cast<std::uint32_t>(std::stoul(f[6])),
                            .batch = static_cast<std::uint32_t>(std::stoul(f[7])),
                            .submit = std::stod(f[2]), .start = std::stod(f[3]),
                            .complete = std::stod(f[4]), .deleted = std::stod(f[5])});
    } catch (const std::exception&) {
      return MakeError(ErrorKind::kMalformedRequest, StrCat("jobs.csv: bad number in '", line, "'"));
    }
  }
  return rows;
}

}  // namespace vnimesh::bench
