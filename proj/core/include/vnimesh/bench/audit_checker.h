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

#ifndef VNIMESH_BENCH_AUDIT_CHECKER_H_
#define VNIMESH_BENCH_AUDIT_CHECKER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vnimesh/store/vni_store.h"

namespace vnimesh::bench {

// Replays the audit log incrementally and flags every successful operation
// that breaks mutual exclusion or the quarantine: an Acquire of a VNI held
// by another owner, an Acquire within the quarantine of the last release, or
// a Release by someone other than the holder.
class AuditChecker {
 public:
  explicit AuditChecker(double quarantine_seconds) : quarantine_(quarantine_seconds) {}

  void Feed(const store::AuditRecord& rec);

  std::int64_t last_seq() const { return last_seq_; }
  std::size_t acquires() const { return acquires_; }
  std::size_t releases() const { return releases_; }
  std::size_t held() const { return holder_.size(); }
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  void Violation(const store::AuditRecord& rec, std::string what);

  double quarantine_;
  std::int64_t last_seq_ = 0;
  std::size_t acquires_ = 0;
  std::size_t releases_ = 0;
  std::map<Vni, std::string> holder_;
  std::map<std::string, Vni> owned_;
  std::map<Vni, Timestamp> released_at_;
  std::vector<std::string> violations_;
};

}  // namespace vnimesh::bench

#endif  // VNIMESH_BENCH_AUDIT_CHECKER_H_
