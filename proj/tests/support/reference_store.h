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

#ifndef VNIMESH_TESTS_SUPPORT_REFERENCE_STORE_H_
#define VNIMESH_TESTS_SUPPORT_REFERENCE_STORE_H_

// Single-threaded reference model of the VNI database, written directly from
// the allocation rules with plain containers. Tests compare the SQLite-backed
// store against it; it shares no code with the implementation.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vnimesh/common/types.h"
#include "vnimesh/store/vni_store.h"

namespace vnimesh::testing {

class ReferenceStore {
 public:
  enum class Outcome { kOk, kPoolExhausted, kNotOwner, kNotAllocated, kUsersRemain };

  ReferenceStore(VniRange pool, double quarantine) : pool_(pool), quarantine_(quarantine) {}

  // Returns the VNI or the failure outcome.
  std::pair<Outcome, Vni> Acquire(const std::string& owner, double now) {
    for (const auto& [vni, e] : entries_) {
      if (e.owner == owner) return {Outcome::kOk, vni};
    }
    for (std::uint32_t v = pool_.first; v <= pool_.last; ++v) {
      auto it = entries_.find(static_cast<Vni>(v));
      const bool eligible =
          it == entries_.end() ||
          (!it->second.owner && it->second.released_at && now - *it->second.released_at > quarantine_);
      if (eligible) {
        Entry& e = entries_[static_cast<Vni>(v)];
        e = Entry{};
        e.owner = owner;
        return {Outcome::kOk, static_cast<Vni>(v)};
      }
    }
    return {Outcome::kPoolExhausted, 0};
  }

  Outcome Release(Vni vni, const std::string& owner, double now) {
    auto it = entries_.find(vni);
    if (it == entries_.end() || !it->second.owner) return Outcome::kNotAllocated;
    if (*it->second.owner != owner) return Outcome::kNotOwner;
    if (!it->second.users.empty()) return Outcome::kUsersRemain;
    it->second.owner.reset();
    it->second.released_at = now;
    return Outcome::kOk;
  }

  Outcome AddUser(Vni vni, const std::string& user) {
    auto it = entries_.find(vni);
    if (it == entries_.end() || !it->second.owner) return Outcome::kNotAllocated;
    it->second.users.insert(user);
    return Outcome::kOk;
  }

  std::pair<Outcome, std::size_t> RemoveUser(Vni vni, const std::string& user) {
    auto it = entries_.find(vni);
    if (it == entries_.end() || !it->second.owner) return {Outcome::kNotAllocated, 0};
    it->second.users.erase(user);
    return {Outcome::kOk, it->second.users.size()};
  }

  // Replay hook: allocates exactly `vni` to `owner`, bypassing selection.
  void ForceAllocate(Vni vni, const std::string& owner) {
    Entry& e = entries_[vni];
    e = Entry{};
    e.owner = owner;
  }

  // Same shape as VniStore::Snapshot(): non-free VNIs ordered by value.
  std::vector<store::VniRecord> Snapshot() const {
    std::vector<store::VniRecord> out;
    for (const auto& [vni, e] : entries_) {
      store::VniRecord rec;
      rec.vni = vni;
      rec.state = e.owner ? store::VniState::kAllocated : store::VniState::kQuarantined;
      rec.owner = e.owner;
      rec.users = e.users;
      if (!e.owner) rec.released_at = e.released_at;
      out.push_back(rec);
    }
    return out;
  }

  std::optional<std::string> OwnerOf(Vni vni) const {
    auto it = entries_.find(vni);
    return it == entries_.end() ? std::nullopt : it->second.owner;
  }

 private:
  struct Entry {
    std::optional<std::string> owner;
    std::set<std::string> users;
    std::optional<double> released_at;
  };

  VniRange pool_;
  double quarantine_;
  std::map<Vni, Entry> entries_;
};

// Replays Ok audit records into a reference model.
inline ReferenceStore ReplayAudit(const std::vector<store::AuditRecord>& log, VniRange pool,
                                  double quarantine) {
  ReferenceStore ref(pool, quarantine);
  for (const auto& rec : log) {
    if (!rec.ok()) continue;
    switch (rec.op) {
      case store::AuditOp::kAcquire:
        ref.ForceAllocate(rec.vni, rec.actor);
        break;
      case store::AuditOp::kRelease:
        ref.Release(rec.vni, rec.actor, rec.at);
        break;
      case store::AuditOp::kAddUser:
        ref.AddUser(rec.vni, rec.actor);
        break;
      case store::AuditOp::kRemoveUser:
        ref.RemoveUser(rec.vni, rec.actor);
        break;
    }
  }
  return ref;
}

}  // namespace vnimesh::testing

#endif  // VNIMESH_TESTS_SUPPORT_REFERENCE_STORE_H_
