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

#ifndef VNIMESH_STORE_VNI_STORE_H_
#define VNIMESH_STORE_VNI_STORE_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "vnimesh/common/clock.h"
#include "vnimesh/common/types.h"

namespace vnimesh::store {

enum class VniState { kFree, kAllocated, kQuarantined };
std::string_view VniStateName(VniState state);

struct VniRecord {
  Vni vni = 0;
  VniState state = VniState::kFree;
  std::optional<std::string> owner;
  std::set<std::string> users;
  std::optional<Timestamp> released_at;

  friend bool operator==(const VniRecord&, const VniRecord&) = default;
};

enum class AuditOp { kAcquire, kRelease, kAddUser, kRemoveUser };
std::string_view AuditOpName(AuditOp op);
std::optional<AuditOp> ParseAuditOp(std::string_view name);

struct AuditRecord {
  std::int64_t seq = 0;
  Timestamp at = 0;
  AuditOp op = AuditOp::kAcquire;
  Vni vni = 0;  // 0 when the call was denied before a VNI was chosen
  std::string actor;
  // Empty for Ok; otherwise the denial reason (an ErrorKind name).
  std::string denied;

  bool ok() const { return denied.empty(); }
  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

struct QuarantinePolicy {
  double duration_seconds = 30.0;
};

struct StoreOptions {
  // SQLite database path; ":memory:" keeps everything in-process.
  std::string path = ":memory:";
  VniRange pool;
  QuarantinePolicy quarantine;
  // Time source for calls that do not take an explicit timestamp. Not owned;
  // defaults to the wall clock.
  const Clock* clock = nullptr;
};

// The VNI database. Every operation runs as one serializable SQLite
// transaction, so check-then-insert sequences have no TOCTOU window even when
// several processes open the same file.
//
// State machine per VNI: Free -> Allocated(owner, users) -> Quarantined
// (released_at) -> Allocated once now - released_at > quarantine duration.
// A VNI without a row is Free.
class VniStore {
 public:
  static absl::StatusOr<std::unique_ptr<VniStore>> Open(StoreOptions options);
  ~VniStore();

  VniStore(const VniStore&) = delete;
  VniStore& operator=(const VniStore&) = delete;

  // Idempotent per owner. Otherwise hands out the lowest VNI that is Free or
  // whose quarantine has expired. PoolExhausted when nothing is eligible.
  absl::StatusOr<Vni> Acquire(std::string_view owner, Timestamp now);
  absl::StatusOr<Vni> Acquire(std::string_view owner);

  // NotAllocated, NotOwner, or UsersRemain on denial.
  absl::Status Release(Vni vni, std::string_view owner, Timestamp now);
  absl::Status Release(Vni vni, std::string_view owner);

  absl::Status AddUser(Vni vni, std::string_view user);
  // Returns the number of users left. Unknown users are a no-op.
  absl::StatusOr<std::size_t> RemoveUser(Vni vni, std::string_view user);

  absl::StatusOr<std::optional<Vni>> LookupOwner(std::string_view owner);

  // lookup_owner + add_user in one transaction, so the user can never land on
  // a VNI that changed hands in between. nullopt when `owner` holds nothing.
  absl::StatusOr<std::optional<Vni>> AddUserToOwnedVni(std::string_view owner,
                                                       std::string_view user);

  // Records with seq > since_seq, oldest first.
  absl::StatusOr<std::vector<AuditRecord>> AuditLog(std::int64_t since_seq = 0);

  absl::StatusOr<VniRecord> Get(Vni vni);
  // Every VNI that is not Free, ordered by value.
  absl::StatusOr<std::vector<VniRecord>> Snapshot();
  absl::StatusOr<std::size_t> CountAllocated();

  const StoreOptions& options() const;

 private:
  struct Impl;
  explicit VniStore(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace vnimesh::store

#endif  // VNIMESH_STORE_VNI_STORE_H_
