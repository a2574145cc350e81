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

#include <filesystem>
#include <random>
#include <set>
#include <thread>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "support/reference_store.h"
#include "support/temp_dir.h"
#include "vnimesh/common/errors.h"

namespace vnimesh::store {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;
using testing::ReferenceStore;

std::unique_ptr<VniStore> OpenMemory(VniRange pool = {}, double quarantine = 30.0) {
  auto store = VniStore::Open({.path = ":memory:",
                               .pool = pool,
                               .quarantine = {.duration_seconds = quarantine},
                               .clock = nullptr});
  EXPECT_TRUE(store.ok()) << store.status();
  return *std::move(store);
}

std::vector<AuditOp> Ops(const std::vector<AuditRecord>& log) {
  std::vector<AuditOp> out;
  for (const auto& rec : log) out.push_back(rec.op);
  return out;
}

TEST(VniStoreTest, RejectsInvalidOptions) {
  EXPECT_FALSE(VniStore::Open({.quarantine = {.duration_seconds = 0}}).ok());
  EXPECT_FALSE(VniStore::Open({.pool = {.first = 2000, .last = 1999}}).ok());
}

TEST(AcquireTest, EmptyStoreHandsOutLowestPoolValue) {
  auto store = OpenMemory();
  EXPECT_EQ(*store->Acquire("job:a/x", 0), 1024);
}

TEST(AcquireTest, IsIdempotentPerOwner) {
  auto store = OpenMemory();
  EXPECT_EQ(*store->Acquire("job:a/x", 0), 1024);
  EXPECT_EQ(*store->Acquire("job:a/x", 1), 1024);
  EXPECT_EQ(*store->Acquire("job:a/y", 2), 1025);
  EXPECT_THAT(Ops(*store->AuditLog()), ElementsAre(AuditOp::kAcquire, AuditOp::kAcquire));
}

TEST(AcquireTest, ReleasedVniStaysQuarantinedForTheFullDuration) {
  auto store = OpenMemory();
  ASSERT_EQ(*store->Acquire("job:a/x", 0), 1024);
  ASSERT_TRUE(store->Release(1024, "job:a/x", 100).ok());
  EXPECT_EQ(*store->Acquire("job:a/y", 125), 1025);
  // Exactly `duration` after release is still inside the quarantine.
  EXPECT_EQ(*store->Acquire("job:a/w", 130), 1026);
  EXPECT_EQ(*store->Acquire("job:a/z", 131), 1024);
}

TEST(AcquireTest, PoolExhaustionIsDeniedAndAudited) {
  auto store = OpenMemory({.first = 1024, .last = 1025});
  ASSERT_EQ(*store->Acquire("o1", 0), 1024);
  ASSERT_EQ(*store->Acquire("o2", 0), 1025);
  auto third = store->Acquire("o3", 0);
  EXPECT_TRUE(Is(third.status(), ErrorKind::kPoolExhausted));
  auto log = *store->AuditLog();
  ASSERT_EQ(log.size(), 3u);
  EXPECT_FALSE(log[2].ok());
  EXPECT_EQ(log[2].denied, "PoolExhausted");
  EXPECT_EQ(log[2].actor, "o3");

  ASSERT_TRUE(store->Release(1024, "o1", 10).ok());
  EXPECT_TRUE(Is(store->Acquire("o3", 40).status(), ErrorKind::kPoolExhausted));
  EXPECT_EQ(*store->Acquire("o3", 40.5), 1024);
}

TEST(AcquireTest, ConcurrentAcquiresAreUniqueAndMatchSequentialReference) {
  auto store = OpenMemory();
  std::vector<std::thread> threads;
  std::vector<Vni> got(64);
  for (int i = 0; i < 64; ++i) {
    threads.emplace_back([&, i] {
      auto v = store->Acquire("job:ns/j" + std::to_string(i), 0);
      ASSERT_TRUE(v.ok()) << v.status();
      got[i] = *v;
    });
  }
  for (auto& t : threads) t.join();

  std::set<Vni> unique(got.begin(), got.end());
  EXPECT_EQ(unique.size(), 64u);
  // A sequential reference hands out the same 64 values in some order.
  ReferenceStore ref({}, 30);
  std::set<Vni> expected;
  for (int i = 0; i < 64; ++i) expected.insert(ref.Acquire("r" + std::to_string(i), 0).second);
  EXPECT_EQ(unique, expected);
  for (int i = 0; i < 64; ++i) {
    EXPECT_EQ(*store->LookupOwner("job:ns/j" + std::to_string(i)), got[i]);
  }
}

TEST(ReleaseTest, MovesToQuarantine) {
  auto store = OpenMemory();
  Vni v = *store->Acquire("job:a/x", 0);
  ASSERT_TRUE(store->Release(v, "job:a/x", 42).ok());
  auto rec = *store->Get(v);
  EXPECT_EQ(rec.state, VniState::kQuarantined);
  EXPECT_EQ(rec.released_at, 42.0);
  EXPECT_FALSE(rec.owner.has_value());
  EXPECT_THAT(rec.users, IsEmpty());
}

TEST(ReleaseTest, WrongOwnerIsDeniedWithoutStateChange) {
  auto store = OpenMemory();
  Vni v = *store->Acquire("job:a/x", 0);
  auto before = *store->Get(v);
  EXPECT_TRUE(Is(store->Release(v, "job:a/other", 1), ErrorKind::kNotOwner));
  EXPECT_EQ(*store->Get(v), before);
}

TEST(ReleaseTest, UnallocatedVniIsDenied) {
  auto store = OpenMemory();
  EXPECT_TRUE(Is(store->Release(1024, "x", 0), ErrorKind::kNotAllocated));
  Vni v = *store->Acquire("x", 0);
  ASSERT_TRUE(store->Release(v, "x", 1).ok());
  EXPECT_TRUE(Is(store->Release(v, "x", 2), ErrorKind::kNotAllocated));
}

TEST(ReleaseTest, ClaimCannotBeReleasedWhileUsersRemain) {
  auto store = OpenMemory();
  Vni v = *store->Acquire("claim:ns/c", 0);
  ASSERT_TRUE(store->AddUser(v, "job:ns/j").ok());
  EXPECT_TRUE(Is(store->Release(v, "claim:ns/c", 1), ErrorKind::kUsersRemain));
  EXPECT_EQ(store->Get(v)->state, VniState::kAllocated);
  EXPECT_EQ(*store->RemoveUser(v, "job:ns/j"), 0u);
  EXPECT_TRUE(store->Release(v, "claim:ns/c", 2).ok());
}

TEST(UserTest, AddUserIsIdempotent) {
  auto store = OpenMemory();
  Vni v = *store->Acquire("claim:ns/c", 0);
  ASSERT_TRUE(store->AddUser(v, "job:ns/a").ok());
  ASSERT_TRUE(store->AddUser(v, "job:ns/a").ok());
  EXPECT_EQ(store->Get(v)->users.size(), 1u);
  EXPECT_THAT(Ops(*store->AuditLog()), ElementsAre(AuditOp::kAcquire, AuditOp::kAddUser));
}

TEST(UserTest, AddUserOnFreeVniIsDenied) {
  auto store = OpenMemory();
  EXPECT_TRUE(Is(store->AddUser(1024, "job:ns/a"), ErrorKind::kNotAllocated));
  EXPECT_TRUE(Is(store->RemoveUser(1024, "job:ns/a").status(), ErrorKind::kNotAllocated));
}

TEST(UserTest, RemoveUserReturnsRemainingCount) {
  auto store = OpenMemory();
  Vni v = *store->Acquire("claim:ns/c", 0);
  ASSERT_TRUE(store->AddUser(v, "u1").ok());
  EXPECT_EQ(*store->RemoveUser(v, "u1"), 0u);
  ASSERT_TRUE(store->AddUser(v, "u1").ok());
  ASSERT_TRUE(store->AddUser(v, "u2").ok());
  EXPECT_EQ(*store->RemoveUser(v, "nobody"), 2u);
}

TEST(UserTest, RandomAddRemoveMatchesShadowSet) {
  auto store = OpenMemory();
  Vni v = *store->Acquire("claim:ns/c", 0);
  std::set<std::string> shadow;
  std::mt19937 rng(11);
  for (int step = 0; step < 300; ++step) {
    std::string user = "job:ns/u" + std::to_string(rng() % 10);
    if (rng() % 2 == 0) {
      ASSERT_TRUE(store->AddUser(v, user).ok());
      shadow.insert(user);
    } else {
      shadow.erase(user);
      ASSERT_EQ(*store->RemoveUser(v, user), shadow.size()) << "step " << step;
    }
    ASSERT_EQ(store->Get(v)->users, shadow) << "step " << step;
  }
}

TEST(LookupOwnerTest, TracksAllocationLifetime) {
  auto store = OpenMemory();
  EXPECT_EQ(*store->LookupOwner("claim:a/c"), std::nullopt);
  Vni v = *store->Acquire("claim:a/c", 0);
  EXPECT_EQ(*store->LookupOwner("claim:a/c"), v);
  ASSERT_TRUE(store->Release(v, "claim:a/c", 1).ok());
  EXPECT_EQ(*store->LookupOwner("claim:a/c"), std::nullopt);
}

TEST(AuditLogTest, RecordsOperationsInOrder) {
  auto store = OpenMemory();
  EXPECT_THAT(*store->AuditLog(), IsEmpty());
  Vni v = *store->Acquire("o", 5);
  ASSERT_TRUE(store->Release(v, "o", 6).ok());
  auto log = *store->AuditLog();
  ASSERT_THAT(Ops(log), ElementsAre(AuditOp::kAcquire, AuditOp::kRelease));
  EXPECT_LT(log[0].seq, log[1].seq);
  EXPECT_EQ(log[0].at, 5.0);
  EXPECT_EQ(log[1].at, 6.0);
  EXPECT_THAT(*store->AuditLog(log[0].seq), ::testing::SizeIs(1));
}

// Counter oracle: the log grows by one for every denied call and every call
// that changed state, and by nothing else. The reference model decides which
// calls changed state.
TEST(AuditLogTest, LengthEqualsStateAffectingCallsOnRandomTrace) {
  VirtualClock clock;
  auto store = *VniStore::Open({.pool = {.first = 1024, .last = 1031},
                                .quarantine = {.duration_seconds = 3},
                                .clock = &clock});
  ReferenceStore ref({.first = 1024, .last = 1031}, 3);
  std::mt19937 rng(2024);
  std::size_t expected = 0;
  for (int step = 0; step < 500; ++step) {
    clock.Advance(0.25 * (rng() % 4));
    const double now = clock.Now();
    const std::string owner = "o" + std::to_string(rng() % 12);
    const std::string user = "u" + std::to_string(rng() % 4);
    const Vni vni = static_cast<Vni>(1024 + rng() % 9);
    const auto snapshot_before = ref.Snapshot();
    bool denied = false;
    switch (rng() % 4) {
      case 0: {
        auto [outcome, v] = ref.Acquire(owner, now);
        denied = outcome != ReferenceStore::Outcome::kOk;
        auto got = store->Acquire(owner, now);
        ASSERT_EQ(got.ok(), outcome == ReferenceStore::Outcome::kOk);
        if (got.ok()) ASSERT_EQ(*got, v);
        break;
      }
      case 1: {
        auto outcome = ref.Release(vni, owner, now);
        denied = outcome != ReferenceStore::Outcome::kOk;
        ASSERT_EQ(store->Release(vni, owner, now).ok(), outcome == ReferenceStore::Outcome::kOk);
        break;
      }
      case 2: {
        auto outcome = ref.AddUser(vni, user);
        denied = outcome != ReferenceStore::Outcome::kOk;
        ASSERT_EQ(store->AddUser(vni, user).ok(), outcome == ReferenceStore::Outcome::kOk);
        break;
      }
      case 3: {
        auto [outcome, left] = ref.RemoveUser(vni, user);
        denied = outcome != ReferenceStore::Outcome::kOk;
        auto got = store->RemoveUser(vni, user);
        ASSERT_EQ(got.ok(), outcome == ReferenceStore::Outcome::kOk);
        if (got.ok()) ASSERT_EQ(*got, left);
        break;
      }
    }
    const auto log = *store->AuditLog();
    const bool changed = ref.Snapshot() != snapshot_before;
    if (changed || denied) ++expected;
    ASSERT_EQ(log.size(), expected) << "step " << step;
  }
  EXPECT_EQ(*store->Snapshot(), ref.Snapshot());
}

TEST(AuditLogTest, ReplayOfOkRecordsReproducesState) {
  auto store = OpenMemory({.first = 1024, .last = 1040}, 2);
  std::mt19937 rng(5);
  double now = 0;
  for (int i = 0; i < 400; ++i) {
    now += 0.5;
    const std::string owner = "o" + std::to_string(rng() % 20);
    if (rng() % 2) {
      (void)store->Acquire(owner, now);
    } else if (auto held = *store->LookupOwner(owner); held) {
      if (rng() % 3 == 0) {
        (void)store->AddUser(*held, "u" + std::to_string(rng() % 3));
      } else if (rng() % 3 == 0) {
        (void)store->RemoveUser(*held, "u" + std::to_string(rng() % 3));
      } else {
        (void)store->Release(*held, owner, now);
      }
    }
  }
  auto replayed = testing::ReplayAudit(*store->AuditLog(), {.first = 1024, .last = 1040}, 2);
  EXPECT_EQ(replayed.Snapshot(), *store->Snapshot());
}

TEST(PersistenceTest, ReopenedStoreKeepsStateAndLog) {
  testing::TempDir dir;
  const std::string path = dir.path() / "vni.db";
  std::vector<VniRecord> before;
  std::vector<AuditRecord> log_before;
  {
    auto store = *VniStore::Open({.path = path});
    Vni a = *store->Acquire("claim:ns/a", 1);
    Vni b = *store->Acquire("job:ns/b", 2);
    ASSERT_TRUE(store->AddUser(a, "job:ns/u").ok());
    ASSERT_TRUE(store->Release(b, "job:ns/b", 3).ok());
    before = *store->Snapshot();
    log_before = *store->AuditLog();
  }
  auto reopened = *VniStore::Open({.path = path});
  EXPECT_EQ(*reopened->Snapshot(), before);
  EXPECT_EQ(*reopened->AuditLog(), log_before);
  EXPECT_EQ(*reopened->LookupOwner("claim:ns/a"), 1024);
  // Quarantine survives the restart.
  EXPECT_EQ(*reopened->Acquire("job:ns/c", 20), 1026);
}

TEST(PersistenceTest, TwoHandlesOnOneFileNeverDoubleAllocate) {
  testing::TempDir dir;
  const std::string path = dir.path() / "vni.db";
  auto first = *VniStore::Open({.path = path});
  auto second = *VniStore::Open({.path = path});
  std::set<Vni> seen;
  std::mutex mu;
  auto worker = [&](VniStore* store, int base) {
    for (int i = 0; i < 50; ++i) {
      auto v = store->Acquire("o" + std::to_string(base + i), 0);
      ASSERT_TRUE(v.ok()) << v.status();
      std::lock_guard lock(mu);
      ASSERT_TRUE(seen.insert(*v).second) << *v;
    }
  };
  std::thread t1(worker, first.get(), 0);
  std::thread t2(worker, second.get(), 1000);
  t1.join();
  t2.join();
  EXPECT_EQ(seen.size(), 100u);
}

}  // namespace
}  // namespace vnimesh::store
