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

#ifndef VNIMESH_COMMON_SUBPROCESS_H_
#define VNIMESH_COMMON_SUBPROCESS_H_

#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace vnimesh {

struct ProcessResult {
  int exit_code = 0;
  std::string stdout_data;
  std::string stderr_data;
};

// Runs `argv` with exactly `env` as its environment, feeds `input` on stdin
// and collects both output streams. A process killed by a signal reports
// 128 + signal.
absl::StatusOr<ProcessResult> RunProcess(const std::vector<std::string>& argv,
                                         const std::map<std::string, std::string>& env,
                                         const std::string& input);

}  // namespace vnimesh

#endif  // VNIMESH_COMMON_SUBPROCESS_H_
