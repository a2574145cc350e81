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

#include "vnimesh/store/vni_store.h"

#include <mutex>
#include <type_traits>
#include <utility>

#include "vnimesh/common/strings.h"
#include "sqlite.h"
#include "vnimesh/common/errors.h"

namespace vnimesh::store {

std::string_view VniStateName(VniState state) {
  switch (state) {
    case VniState::kFree:
      return "free";
    case VniState::kAllocated:
      return "allocated";
    case VniState::kQuarantined:
      return "quarantined";
  }
  return "unknown";
}

std::string_view AuditOpName(AuditOp op) {
  switch (op) {
    case AuditOp::kAcquire:
      return "acquire";
    case AuditOp::kRelease:
      return "release";
    case AuditOp::kAddUser:
      return "add_user";
    case AuditOp::kRemoveUser:
      return "remove_user";
  }
  return "unknown";
}

std::optional<AuditOp> ParseAuditOp(std::string_view name) {
  if (name == "acquire") return AuditOp::kAcquire;
  if (name == "release") return AuditOp::kRelease;
  if (name == "add_user") return AuditOp::kAddUser;
  if (name == "remove_user") return AuditOp::kRemoveUser;
  return std::nullopt;
}

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS vnis (
  vni         INTEGER PRIMARY KEY,
  state       TEXT    NOT NULL CHECK (state IN ('allocated', 'quarantined')),
  owner       TEXT    UNIQUE,
  released_at REAL,
  CHECK ((state = 'allocated') = (owner IS NOT NULL)),
  CHECK ((state = 'quarantined') = (released_at IS NOT NULL))
);
CREATE TABLE IF NOT EXISTS vni_users (
  vni  INTEGER NOT NULL REFERENCES vnis (vni),
  user TEXT    NOT NULL,
  PRIMARY KEY (vni, user)
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS audit (
  seq    INTEGER PRIMARY KEY AUTOINCREMENT,
  at     REAL    NOT NULL,
  op     TEXT    NOT NULL,
  vni    INTEGER NOT NULL,
  actor  TEXT    NOT NULL,
  denied TEXT    NOT NULL DEFAULT ''
);
)sql";

const WallClock& DefaultClock() {
  static const WallClock clock;
  return clock;
}

template <typename T>
struct IsStatusOr : std::false_type {};
template <typename T>
struct IsStatusOr<absl::StatusOr<T>> : std::true_type {};

}  // namespace

struct VniStore::Impl {
  StoreOptions options;
  sql::Database db;
  std::mutex mu;

  sql::Statement begin{db.get(), "BEGIN IMMEDIATE"};
  sql::Statement commit{db.get(), "COMMIT"};
  sql::Statement rollback{db.get(), "ROLLBACK"};

  sql::Statement owned_by{db.get(),
                          "SELECT vni FROM vnis WHERE owner = ?1 AND state = 'allocated'"};
  sql::Statement row_at{db.get(), "SELECT state, owner, released_at FROM vnis WHERE vni = ?1"};
  sql::Statement first_gap{db.get(),
                           "SELECT MIN(v.vni + 1) FROM vnis v WHERE v.vni >= ?1 AND v.vni < ?2 "
                           "AND NOT EXISTS (SELECT 1 FROM vnis w WHERE w.vni = v.vni + 1)"};
  sql::Statement first_expired{
      db.get(),
      "SELECT MIN(vni) FROM vnis WHERE state = 'quarantined' AND vni BETWEEN ?1 AND ?2 "
      "AND ?3 - released_at > ?4"};
  sql::Statement allocate{db.get(),
                          "INSERT OR REPLACE INTO vnis (vni, state, owner, released_at) "
                          "VALUES (?1, 'allocated', ?2, NULL)"};
  sql::Statement quarantine{db.get(),
                            "UPDATE vnis SET state = 'quarantined', owner = NULL, "
                            "released_at = ?2 WHERE vni = ?1"};
  sql::Statement count_users{db.get(), "SELECT COUNT(*) FROM vni_users WHERE vni = ?1"};
  sql::Statement clear_users{db.get(), "DELETE FROM vni_users WHERE vni = ?1"};
  sql::Statement insert_user{db.get(), "INSERT OR IGNORE INTO vni_users (vni, user) VALUES (?1, ?2)"};
  sql::Statement delete_user{db.get(), "DELETE FROM vni_users WHERE vni = ?1 AND user = ?2"};
  sql::Statement users_of{db.get(), "SELECT user FROM vni_users WHERE vni = ?1 ORDER BY user"};
  sql::Statement append_audit{db.get(),
                              "INSERT INTO audit (at, op, vni, actor, denied) "
                              "VALUES (?1, ?2, ?3, ?4, ?5)"};
  sql::Statement read_audit{db.get(),
                            "SELECT seq, at, op, vni, actor, denied FROM audit "
                            "WHERE seq > ?1 ORDER BY seq"};
  sql::Statement all_rows{db.get(),
                          "SELECT vni, state, owner, released_at FROM vnis ORDER BY vni"};
  sql::Statement count_allocated{db.get(),
                                 "SELECT COUNT(*) FROM vnis WHERE state = 'allocated'"};

  Impl(StoreOptions opts, sql::Database database)
      : options(std::move(opts)), db(std::move(database)) {}

  bool Prepared() const {
    for (const sql::Statement* s :
         {&begin, &commit, &rollback, &owned_by, &row_at, &first_gap, &first_expired, &allocate,
          &quarantine, &count_users, &clear_users, &insert_user, &delete_user, &users_of,
          &append_audit, &read_audit, &all_rows, &count_allocated}) {
      if (!s->valid()) return false;
    }
    return true;
  }

  Timestamp Now() const { return options.clock ? options.clock->Now() : DefaultClock().Now(); }

  // Runs `fn` inside BEGIN IMMEDIATE ... COMMIT. Domain denials commit (their
  // audit record must persist); storage failures roll back.
  template <typename Fn>
  auto InTransaction(Fn&& fn) -> decltype(fn()) {
    std::lock_guard lock(mu);
    if (auto s = begin.Run(); !s.ok()) return s;
    auto result = fn();
    absl::Status status;
    if constexpr (IsStatusOr<decltype(result)>::value) {
      status = result.status();
    } else {
      status = result;
    }
    if (status.ok() || KindOf(status).has_value()) {
      if (auto s = commit.Run(); !s.ok()) {
        (void)rollback.Run();
        return s;
      }
    } else {
      (void)rollback.Run();
    }
    return result;
  }

  absl::Status Audit(Timestamp at, AuditOp op, Vni vni, std::string_view actor,
                     std::string_view denied = {}) {
    return append_audit.Bind(1, at)
        .Bind(2, AuditOpName(op))
        .Bind(3, std::int64_t{vni})
        .Bind(4, actor)
        .Bind(5, denied)
        .Run();
  }

  absl::Status Deny(Timestamp at, AuditOp op, Vni vni, std::string_view actor, ErrorKind kind,
                    std::string_view message) {
    if (auto s = Audit(at, op, vni, actor, ErrorKindName(kind)); !s.ok()) return s;
    return MakeError(kind, message);
  }

  struct Row {
    VniState state;
    std::optional<std::string> owner;
    std::optional<Timestamp> released_at;
  };

  absl::StatusOr<std::optional<Row>> ReadRow(Vni vni) {
    sql::ScopedReset reset(row_at);
    row_at.Bind(1, std::int64_t{vni});
    auto has = row_at.Step();
    if (!has.ok()) return has.status();
    if (!*has) return std::optional<Row>();
    Row row;
    row.state = row_at.Text(0) == "allocated" ? VniState::kAllocated : VniState::kQuarantined;
    if (!row_at.IsNull(1)) row.owner = row_at.Text(1);
    if (!row_at.IsNull(2)) row.released_at = row_at.Real(2);
    return std::optional<Row>(std::move(row));
  }

  absl::StatusOr<std::optional<std::int64_t>> ScalarOrNull(sql::Statement& stmt) {
    sql::ScopedReset reset(stmt);
    auto has = stmt.Step();
    if (!has.ok()) return has.status();
    if (!*has || stmt.IsNull(0)) return std::optional<std::int64_t>();
    return std::optional<std::int64_t>(stmt.Int(0));
  }

  absl::StatusOr<std::optional<Vni>> Owned(std::string_view owner) {
    owned_by.Bind(1, owner);
    auto v = ScalarOrNull(owned_by);
    if (!v.ok()) return v.status();
    if (!v->has_value()) return std::optional<Vni>();
    return std::optional<Vni>(static_cast<Vni>(**v));
  }

  absl::StatusOr<std::size_t> UserCount(Vni vni) {
    count_users.Bind(1, std::int64_t{vni});
    auto v = ScalarOrNull(count_users);
    if (!v.ok()) return v.status();
    return static_cast<std::size_t>(v->value_or(0));
  }

  // Lowest eligible VNI, or nullopt when the pool is exhausted.
  absl::StatusOr<std::optional<Vni>> PickCandidate(Timestamp now) {
    const std::int64_t lo = options.pool.first;
    const std::int64_t hi = options.pool.last;
    std::optional<std::int64_t> best;

    auto lo_row = ReadRow(static_cast<Vni>(lo));
    if (!lo_row.ok()) return lo_row.status();
    if (!lo_row->has_value()) {
      best = lo;
    } else {
      first_gap.Bind(1, lo).Bind(2, hi);
      auto gap = ScalarOrNull(first_gap);
      if (!gap.ok()) return gap.status();
      best = *gap;
    }

    first_expired.Bind(1, lo).Bind(2, hi).Bind(3, now).Bind(4, options.quarantine.duration_seconds);
    auto expired = ScalarOrNull(first_expired);
    if (!expired.ok()) return expired.status();
    if (expired->has_value() && (!best || **expired < *best)) best = *expired;

    if (!best) return std::optional<Vni>();
    return std::optional<Vni>(static_cast<Vni>(*best));
  }

  absl::StatusOr<std::set<std::string>> Users(Vni vni) {
    sql::ScopedReset reset(users_of);
    users_of.Bind(1, std::int64_t{vni});
    std::set<std::string> out;
    while (true) {
      auto row = users_of.Step();
      if (!row.ok()) return row.status();
      if (!*row) break;
      out.insert(users_of.Text(0));
    }
    return out;
  }
};

VniStore::VniStore(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
VniStore::~VniStore() = default;

absl::StatusOr<std::unique_ptr<VniStore>> VniStore::Open(StoreOptions options) {
  if (options.quarantine.duration_seconds <= 0) {
    return absl::InvalidArgumentError("quarantine duration must be positive");
  }
  if (options.pool.first > options.pool.last) {
    return absl::InvalidArgumentError("VNI pool range is empty");
  }
  auto db = sql::Database::Open(options.path);
  if (!db.ok()) return db.status();
  if (options.path != ":memory:" && !options.path.empty()) {
    if (auto s = db->Exec("PRAGMA journal_mode=WAL; PRAGMA synchronous=NORMAL;"); !s.ok()) {
      return s;
    }
  }
  if (auto s = db->Exec("PRAGMA foreign_keys=ON;"); !s.ok()) return s;
  if (auto s = db->Exec(kSchema); !s.ok()) return s;

  auto impl = std::make_unique<Impl>(std::move(options), *std::move(db));
  if (!impl->Prepared()) return sql::Error(impl->db.get(), "prepare");
  return std::unique_ptr<VniStore>(new VniStore(std::move(impl)));
}

const StoreOptions& VniStore::options() const { return impl_->options; }

absl::StatusOr<Vni> VniStore::Acquire(std::string_view owner) {
  return Acquire(owner, impl_->Now());
}

absl::StatusOr<Vni> VniStore::Acquire(std::string_view owner, Timestamp now) {
  Impl& s = *impl_;
  return s.InTransaction([&]() -> absl::StatusOr<Vni> {
    auto held = s.Owned(owner);
    if (!held.ok()) return held.status();
    if (held->has_value()) return **held;

    auto candidate = s.PickCandidate(now);
    if (!candidate.ok()) return candidate.status();
    if (!candidate->has_value()) {
      return s.Deny(now, AuditOp::kAcquire, 0, owner, ErrorKind::kPoolExhausted,
                    "no VNI is free or out of quarantine");
    }
    const Vni vni = **candidate;
    if (auto st = s.clear_users.Bind(1, std::int64_t{vni}).Run(); !st.ok()) return st;
    if (auto st = s.allocate.Bind(1, std::int64_t{vni}).Bind(2, owner).Run(); !st.ok()) return st;
    if (auto st = s.Audit(now, AuditOp::kAcquire, vni, owner); !st.ok()) return st;
    return vni;
  });
}

absl::Status VniStore::Release(Vni vni, std::string_view owner) {
  return Release(vni, owner, impl_->Now());
}

absl::Status VniStore::Release(Vni vni, std::string_view owner, Timestamp now) {
  Impl& s = *impl_;
  return s.InTransaction([&]() -> absl::Status {
    auto row = s.ReadRow(vni);
    if (!row.ok()) return row.status();
    if (!row->has_value() || (*row)->state != VniState::kAllocated) {
      return s.Deny(now, AuditOp::kRelease, vni, owner, ErrorKind::kNotAllocated,
                    StrCat("VNI ", vni, " is not allocated"));
    }
    if ((*row)->owner != owner) {
      return s.Deny(now, AuditOp::kRelease, vni, owner, ErrorKind::kNotOwner,
                    StrCat("VNI ", vni, " is not owned by ", owner));
    }
    auto users = s.UserCount(vni);
    if (!users.ok()) return users.status();
    if (*users > 0) {
      return s.Deny(now, AuditOp::kRelease, vni, owner, ErrorKind::kUsersRemain,
                    StrCat("VNI ", vni, " still has ", *users, " users"));
    }
    if (auto st = s.quarantine.Bind(1, std::int64_t{vni}).Bind(2, now).Run(); !st.ok()) return st;
    return s.Audit(now, AuditOp::kRelease, vni, owner);
  });
}

absl::Status VniStore::AddUser(Vni vni, std::string_view user) {
  Impl& s = *impl_;
  const Timestamp now = s.Now();
  return s.InTransaction([&]() -> absl::Status {
    auto row = s.ReadRow(vni);
    if (!row.ok()) return row.status();
    if (!row->has_value() || (*row)->state != VniState::kAllocated) {
      return s.Deny(now, AuditOp::kAddUser, vni, user, ErrorKind::kNotAllocated,
                    StrCat("VNI ", vni, " is not allocated"));
    }
    if (auto st = s.insert_user.Bind(1, std::int64_t{vni}).Bind(2, user).Run(); !st.ok()) {
      return st;
    }
    if (sqlite3_changes(s.db.get()) == 0) return absl::OkStatus();
    return s.Audit(now, AuditOp::kAddUser, vni, user);
  });
}

absl::StatusOr<std::size_t> VniStore::RemoveUser(Vni vni, std::string_view user) {
  Impl& s = *impl_;
  const Timestamp now = s.Now();
  return s.InTransaction([&]() -> absl::StatusOr<std::size_t> {
    auto row = s.ReadRow(vni);
    if (!row.ok()) return row.status();
    if (!row->has_value() || (*row)->state != VniState::kAllocated) {
      return s.Deny(now, AuditOp::kRemoveUser, vni, user, ErrorKind::kNotAllocated,
                    StrCat("VNI ", vni, " is not allocated"));
    }
    if (auto st = s.delete_user.Bind(1, std::int64_t{vni}).Bind(2, user).Run(); !st.ok()) {
      return st;
    }
    if (sqlite3_changes(s.db.get()) > 0) {
      if (auto st = s.Audit(now, AuditOp::kRemoveUser, vni, user); !st.ok()) return st;
    }
    return s.UserCount(vni);
  });
}

absl::StatusOr<std::optional<Vni>> VniStore::LookupOwner(std::string_view owner) {
  std::lock_guard lock(impl_->mu);
  return impl_->Owned(owner);
}

absl::StatusOr<std::optional<Vni>> VniStore::AddUserToOwnedVni(std::string_view owner,
                                                                std::string_view user) {
  Impl& s = *impl_;
  const Timestamp now = s.Now();
  return s.InTransaction([&]() -> absl::StatusOr<std::optional<Vni>> {
    auto held = s.Owned(owner);
    if (!held.ok() || !held->has_value()) return held;
    const Vni vni = **held;
    if (auto st = s.insert_user.Bind(1, std::int64_t{vni}).Bind(2, user).Run(); !st.ok()) {
      return st;
    }
    if (sqlite3_changes(s.db.get()) > 0) {
      if (auto st = s.Audit(now, AuditOp::kAddUser, vni, user); !st.ok()) return st;
    }
    return held;
  });
}

absl::StatusOr<std::vector<AuditRecord>> VniStore::AuditLog(std::int64_t since_seq) {
  Impl& s = *impl_;
  std::lock_guard lock(s.mu);
  sql::ScopedReset reset(s.read_audit);
  s.read_audit.Bind(1, since_seq);
  std::vector<AuditRecord> out;
  while (true) {
    auto row = s.read_audit.Step();
    if (!row.ok()) return row.status();
    if (!*row) break;
    AuditRecord rec;
    rec.seq = s.read_audit.Int(0);
    rec.at = s.read_audit.Real(1);
    rec.op = ParseAuditOp(s.read_audit.Text(2)).value_or(AuditOp::kAcquire);
    rec.vni = static_cast<Vni>(s.read_audit.Int(3));
    rec.actor = s.read_audit.Text(4);
    rec.denied = s.read_audit.Text(5);
    out.push_back(std::move(rec));
  }
  return out;
}

absl::StatusOr<VniRecord> VniStore::Get(Vni vni) {
  Impl& s = *impl_;
  std::lock_guard lock(s.mu);
  auto row = s.ReadRow(vni);
  if (!row.ok()) return row.status();
  VniRecord rec;
  rec.vni = vni;
  if (!row->has_value()) return rec;
  rec.state = (*row)->state;
  rec.owner = (*row)->owner;
  rec.released_at = (*row)->released_at;
  auto users = s.Users(vni);
  if (!users.ok()) return users.status();
  rec.users = *std::move(users);
  return rec;
}

absl::StatusOr<std::vector<VniRecord>> VniStore::Snapshot() {
  Impl& s = *impl_;
  std::lock_guard lock(s.mu);
  std::vector<VniRecord> out;
  {
    sql::ScopedReset reset(s.all_rows);
    while (true) {
      auto row = s.all_rows.Step();
      if (!row.ok()) return row.status();
      if (!*row) break;
      VniRecord rec;
      rec.vni = static_cast<Vni>(s.all_rows.Int(0));
      rec.state = s.all_rows.Text(1) == "allocated" ? VniState::kAllocated
                                                     : VniState::kQuarantined;
      if (!s.all_rows.IsNull(2)) rec.owner = s.all_rows.Text(2);
      if (!s.all_rows.IsNull(3)) rec.released_at = s.all_rows.Real(3);
      out.push_back(std::move(rec));
    }
  }
  for (auto& rec : out) {
    auto users = s.Users(rec.vni);
    if (!users.ok()) return users.status();
    rec.users = *std::move(users);
  }
  return out;
}

absl::StatusOr<std::size_t> VniStore::CountAllocated() {
  std::lock_guard lock(impl_->mu);
  auto v = impl_->ScalarOrNull(impl_->count_allocated);
  if (!v.ok()) return v.status();
  return static_cast<std::size_t>(v->value_or(0));
}

}  // namespace vnimesh::store
