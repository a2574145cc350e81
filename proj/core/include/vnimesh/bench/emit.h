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

#ifndef VNIMESH_BENCH_EMIT_H_
#define VNIMESH_BENCH_EMIT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "vnimesh/bench/harness.h"

namespace vnimesh::bench {

// jobs.csv:     job_ref,mode,submit,start,complete,delete,run,batch
// timeline.csv: mode,run,t,active
// Times are printed with microsecond precision, so emitting the same result
// twice gives identical bytes.
std::string JobsCsv(const ExperimentResult& result);
std::string TimelineCsv(const ExperimentResult& result);
nlohmann::ordered_json SummaryJson(const ExperimentResult& result);

// Writes jobs.csv, timeline.csv and summary.json into `dir`, creating it.
absl::Status Emit(const ExperimentResult& result, const std::filesystem::path& dir);

// Parses a jobs.csv written by JobsCsv.
absl::StatusOr<std::vector<JobRow>> ParseJobsCsv(const std::string& text);

}  // namespace vnimesh::bench

#endif  // VNIMESH_BENCH_EMIT_H_
