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

#include "vnimesh/bench/audit_checker.h"

#include "vnimesh/common/strings.h"

namespace vnimesh::bench {

void AuditChecker::Violation(const store::AuditRecord& rec, std::string what) {
  violations_.push_back(StrCat("seq ", rec.seq, " ", store::AuditOpName(rec.op), " vni ", rec.vni,
                               " by ", rec.actor, ": ", what));
}

void AuditChecker::Feed(const store::AuditRecord& rec) {
  if (rec.seq <= last_seq_) return;
  if (rec.seq != last_seq_ + 1) Violation(rec, StrCat("gap after seq ", last_seq_));
  last_seq_ = rec.seq;
  if (!rec.ok()) return;

  switch (rec.op) {
    case store::AuditOp::kAcquire: {
      ++acquires_;
      if (auto it = owned_.find(rec.actor); it != owned_.end()) {
        // Idempotent re-acquire must return the same VNI.
        if (it->second != rec.vni) Violation(rec, StrCat("owner already holds ", it->second));
        break;
      }
      if (auto it = holder_.find(rec.vni); it != holder_.end()) {
        Violation(rec, StrCat("double allocation, held by ", it->second));
        break;
      }
      if (auto it = released_at_.find(rec.vni);
          it != released_at_.end() && !(rec.at - it->second > quarantine_)) {
        Violation(rec, StrCat("reallocated ", rec.at - it->second, " s after release"));
      }
      holder_[rec.vni] = rec.actor;
      owned_[rec.actor] = rec.vni;
      break;
    }
    case store::AuditOp::kRelease: {
      ++releases_;
      auto it = holder_.find(rec.vni);
      if (it == holder_.end() || it->second != rec.actor) {
        Violation(rec, "release by non-holder");
        break;
      }
      owned_.erase(it->second);
      holder_.erase(it);
      released_at_[rec.vni] = rec.at;
      break;
    }
    case store::AuditOp::kAddUser:
    case store::AuditOp::kRemoveUser:
      if (!holder_.contains(rec.vni)) Violation(rec, "user change on an unheld VNI");
      break;
  }
}

}  // namespace vnimesh::bench
