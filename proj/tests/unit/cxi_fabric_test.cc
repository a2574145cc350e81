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

#include "vnimesh/cxi/fabric.h"

#include <array>
#include <random>
#include <set>
#include <thread>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "vnimesh/common/errors.h"

namespace vnimesh::cxi {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;
using ::testing::SizeIs;

std::vector<std::byte> Bytes(std::string_view s) {
  std::vector<std::byte> out;
  for (char c : s) out.push_back(static_cast<std::byte>(c));
  return out;
}

TEST(CreateServiceTest, FirstServiceOnEmptyRegistryGetsIdOne) {
  Fabric fabric{"n0"};
  auto id = fabric.CreateService("n0", MemberSpec::Netns(4026531840), {1024});
  ASSERT_TRUE(id.ok()) << id.status();
  EXPECT_EQ(*id, 1u);
}

TEST(CreateServiceTest, EmptyVniSetIsRejected) {
  Fabric fabric{"n0"};
  auto id = fabric.CreateService("n0", MemberSpec::Uid(1000), {});
  EXPECT_TRUE(Is(id.status(), ErrorKind::kEmptyVniSet));
  EXPECT_THAT(*fabric.ListServices("n0"), IsEmpty());
}

TEST(CreateServiceTest, UnknownNodeIsRejected) {
  Fabric fabric{"n0"};
  EXPECT_TRUE(Is(fabric.CreateService("n9", MemberSpec::Uid(1), {1}).status(),
                 ErrorKind::kUnknownNode));
  EXPECT_TRUE(Is(fabric.ListServices("n9").status(), ErrorKind::kUnknownNode));
}

TEST(CreateServiceTest, TwoCreatesYieldDistinctRetrievableIds) {
  Fabric fabric{"n0"};
  auto a = fabric.CreateService("n0", MemberSpec::Uid(1), {1024});
  auto b = fabric.CreateService("n0", MemberSpec::Gid(2), {1025});
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_NE(*a, *b);
  auto list = *fabric.ListServices("n0");
  auto has = [&](ServiceId id) {
    for (const auto& svc : list) {
      if (svc.id == id) return true;
    }
    return false;
  };
  EXPECT_TRUE(has(*a));
  EXPECT_TRUE(has(*b));
}

TEST(DeleteServiceTest, RemovesServiceAndRejectsUnknownIds) {
  Fabric fabric{"n0"};
  ASSERT_EQ(*fabric.CreateService("n0", MemberSpec::Uid(1), {1024}), 1u);
  EXPECT_TRUE(fabric.DeleteService("n0", 1).ok());
  EXPECT_THAT(*fabric.ListServices("n0"), IsEmpty());
  EXPECT_TRUE(Is(fabric.DeleteService("n0", 99), ErrorKind::kUnknownService));
  EXPECT_TRUE(Is(fabric.DeleteService("n0", 1), ErrorKind::kUnknownService));
}

TEST(DeleteServiceTest, ServiceIdsAreNeverReused) {
  Fabric fabric{"n0"};
  auto a = *fabric.CreateService("n0", MemberSpec::Uid(1), {1024});
  ASSERT_TRUE(fabric.DeleteService("n0", a).ok());
  auto b = *fabric.CreateService("n0", MemberSpec::Uid(1), {1024});
  EXPECT_GT(b, a);
}

TEST(DeleteServiceTest, TransmitAfterDeleteIsDroppedNoService) {
  Fabric fabric{"n0", "n1"};
  auto s0 = *fabric.CreateService("n0", MemberSpec::Netns(10), {2000});
  ASSERT_TRUE(fabric.CreateService("n1", MemberSpec::Netns(11), {2000}).ok());
  auto e0 = *fabric.AllocEndpoint("n0", {.netns_inode = 10}, 2000);
  auto e1 = *fabric.AllocEndpoint("n1", {.netns_inode = 11}, 2000);
  ASSERT_TRUE(fabric.Transmit(e0, e1, Bytes("hi")).delivered());

  ASSERT_TRUE(fabric.DeleteService("n0", s0).ok());
  EXPECT_EQ(fabric.Transmit(e0, e1, Bytes("hi")), TransmitResult::Dropped(DropReason::kNoService));
  EXPECT_EQ(fabric.Transmit(e1, e0, Bytes("hi")), TransmitResult::Dropped(DropReason::kNoService));
  EXPECT_TRUE(Is(fabric.AllocEndpoint("n0", {.netns_inode = 10}, 2000).status(),
                 ErrorKind::kPermissionDenied));
}

TEST(AllocEndpointTest, NetnsMemberAuthenticatesByNamespaceInode) {
  Fabric fabric{"n0"};
  auto svc = *fabric.CreateService("n0", MemberSpec::Netns(500), {2000});
  auto ok = fabric.AllocEndpoint("n0", {.uid = 0, .gid = 0, .netns_inode = 500}, 2000);
  ASSERT_TRUE(ok.ok()) << ok.status();
  EXPECT_EQ(ok->vni, 2000);
  EXPECT_EQ(ok->service_id, svc);

  auto denied = fabric.AllocEndpoint("n0", {.uid = 0, .gid = 0, .netns_inode = 501}, 2000);
  EXPECT_TRUE(Is(denied.status(), ErrorKind::kPermissionDenied));
}

TEST(AllocEndpointTest, WrongVniIsDenied) {
  Fabric fabric{"n0"};
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Netns(500), {2000}).ok());
  EXPECT_TRUE(Is(fabric.AllocEndpoint("n0", {.netns_inode = 500}, 2001).status(),
                 ErrorKind::kPermissionDenied));
}

TEST(AllocEndpointTest, ZeroInodeIsInvalid) {
  Fabric fabric{"n0"};
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Uid(0), {2000}).ok());
  EXPECT_EQ(fabric.AllocEndpoint("n0", {.uid = 0, .netns_inode = 0}, 2000).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(AllocEndpointTest, QuotaIsEnforcedAndFreed) {
  Fabric fabric{"n0"};
  auto svc = *fabric.CreateService("n0", MemberSpec::Netns(7), {3000}, 2);
  auto a = fabric.AllocEndpoint("n0", {.netns_inode = 7}, 3000);
  auto b = fabric.AllocEndpoint("n0", {.netns_inode = 7}, 3000);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_TRUE(Is(fabric.AllocEndpoint("n0", {.netns_inode = 7}, 3000).status(),
                 ErrorKind::kEndpointQuotaExceeded));
  auto list = *fabric.ListServices("n0");
  ASSERT_THAT(list, SizeIs(1));
  EXPECT_EQ(list[0].id, svc);
  EXPECT_EQ(list[0].active_endpoints, 2u);

  ASSERT_TRUE(fabric.FreeEndpoint(*a).ok());
  EXPECT_TRUE(fabric.AllocEndpoint("n0", {.netns_inode = 7}, 3000).ok());
}

// Brute force: one service per member kind, all with value 7; each context
// field either matches (7) or not (8).
TEST(AllocEndpointTest, AuthenticationMatrixMatchesReferencePredicate) {
  Fabric fabric{"n0"};
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Uid(7), {10}).ok());
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Gid(7), {11}).ok());
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Netns(7), {12}).ok());

  int successes = 0;
  int cases = 0;
  for (int mask = 0; mask < 8; ++mask) {
    ProcessContext ctx{.uid = (mask & 1) ? 7u : 8u,
                       .gid = (mask & 2) ? 7u : 8u,
                       .netns_inode = (mask & 4) ? 7u : 8u};
    for (Vni vni : {Vni{10}, Vni{11}, Vni{12}}) {
      ++cases;
      const bool expected = (vni == 10 && ctx.uid == 7) || (vni == 11 && ctx.gid == 7) ||
                            (vni == 12 && ctx.netns_inode == 7);
      auto got = fabric.AllocEndpoint("n0", ctx, vni);
      EXPECT_EQ(got.ok(), expected) << "mask=" << mask << " vni=" << vni;
      if (got.ok()) ++successes;
    }
  }
  EXPECT_EQ(cases, 24);
  EXPECT_EQ(successes, 12);
}

TEST(AllocEndpointTest, UidAndGidNeverAffectNetnsAuthentication) {
  Fabric fabric{"n0"};
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Netns(4026532001), {1500}).ok());
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    const bool right_ns = rng() % 2 == 0;
    ProcessContext ctx{.uid = rng() % 3 == 0 ? 0 : rng(),
                       .gid = rng() % 3 == 0 ? 0 : rng(),
                       .netns_inode = right_ns ? 4026532001u : 4026532002u + rng() % 100};
    auto got = fabric.AllocEndpoint("n0", ctx, 1500);
    ASSERT_EQ(got.ok(), right_ns) << "uid=" << ctx.uid << " gid=" << ctx.gid;
    if (got.ok()) ASSERT_TRUE(fabric.FreeEndpoint(*got).ok());
  }
}

TEST(TransmitTest, SameVniIsDeliveredAndQueued) {
  Fabric fabric{"n0", "n1"};
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Netns(1), {2000}).ok());
  ASSERT_TRUE(fabric.CreateService("n1", MemberSpec::Netns(2), {2000}).ok());
  auto a = *fabric.AllocEndpoint("n0", {.netns_inode = 1}, 2000);
  auto b = *fabric.AllocEndpoint("n1", {.netns_inode = 2}, 2000);
  EXPECT_TRUE(fabric.Transmit(a, b, Bytes("ping")).delivered());
  EXPECT_THAT(fabric.Receive(b), ElementsAre(Bytes("ping")));
  EXPECT_THAT(fabric.Receive(b), IsEmpty());
}

TEST(TransmitTest, DifferentVniIsDroppedVniMismatch) {
  Fabric fabric{"n0", "n1"};
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Netns(1), {2000}).ok());
  ASSERT_TRUE(fabric.CreateService("n1", MemberSpec::Netns(2), {2001}).ok());
  auto a = *fabric.AllocEndpoint("n0", {.netns_inode = 1}, 2000);
  auto b = *fabric.AllocEndpoint("n1", {.netns_inode = 2}, 2001);
  EXPECT_EQ(fabric.Transmit(a, b, Bytes("x")), TransmitResult::Dropped(DropReason::kVniMismatch));
  EXPECT_THAT(fabric.Receive(b), IsEmpty());
}

TEST(TransmitTest, FreedOrForgedEndpointsAreDead) {
  Fabric fabric{"n0"};
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Netns(1), {2000, 2001}).ok());
  auto a = *fabric.AllocEndpoint("n0", {.netns_inode = 1}, 2000);
  auto b = *fabric.AllocEndpoint("n0", {.netns_inode = 1}, 2000);
  EndpointHandle forged = b;
  forged.vni = 2001;
  EXPECT_EQ(fabric.Transmit(a, forged, Bytes("x")),
            TransmitResult::Dropped(DropReason::kDeadEndpoint));
  ASSERT_TRUE(fabric.FreeEndpoint(b).ok());
  EXPECT_EQ(fabric.Transmit(a, b, Bytes("x")), TransmitResult::Dropped(DropReason::kDeadEndpoint));
}

// {src vni, dst vni} in {a, b}^2 crossed with "delete src service" and
// "delete dst service" toggles: delivered iff equal VNIs and both live.
TEST(TransmitTest, ToggleMatrixDeliversIffEqualAndLive) {
  constexpr Vni kA = 3000;
  constexpr Vni kB = 3001;
  int delivered = 0;
  int cases = 0;
  for (Vni src_vni : {kA, kB}) {
    for (Vni dst_vni : {kA, kB}) {
      for (int toggle = 0; toggle < 2; ++toggle) {
        Fabric fabric{"n0", "n1"};
        auto s0 = *fabric.CreateService("n0", MemberSpec::Netns(1), {src_vni});
        auto s1 = *fabric.CreateService("n1", MemberSpec::Netns(2), {dst_vni});
        auto src = *fabric.AllocEndpoint("n0", {.netns_inode = 1}, src_vni);
        auto dst = *fabric.AllocEndpoint("n1", {.netns_inode = 2}, dst_vni);
        if (toggle == 1) {
          ASSERT_TRUE(fabric.DeleteService(cases % 2 == 0 ? "n0" : "n1",
                                           cases % 2 == 0 ? s0 : s1)
                          .ok());
        }
        ++cases;
        const bool expected = src_vni == dst_vni && toggle == 0;
        const auto result = fabric.Transmit(src, dst, Bytes("p"));
        EXPECT_EQ(result.delivered(), expected);
        if (result.delivered()) ++delivered;
        if (toggle == 1) EXPECT_EQ(result.dropped, DropReason::kNoService);
        if (toggle == 0 && src_vni != dst_vni) EXPECT_EQ(result.dropped, DropReason::kVniMismatch);
      }
    }
  }
  EXPECT_EQ(cases, 8);
  EXPECT_EQ(delivered, 2);
}

TEST(ListServicesTest, FreshNodeIsEmptyAndTracksDeletes) {
  Fabric fabric{"n0"};
  EXPECT_THAT(*fabric.ListServices("n0"), IsEmpty());
  auto a = *fabric.CreateService("n0", MemberSpec::Uid(1), {1});
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Uid(2), {2}).ok());
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Uid(3), {3}).ok());
  ASSERT_TRUE(fabric.DeleteService("n0", a).ok());
  EXPECT_THAT(*fabric.ListServices("n0"), SizeIs(2));
}

TEST(ListServicesTest, RandomTraceMatchesShadowSet) {
  Fabric fabric{"n0"};
  std::set<ServiceId> shadow;
  std::mt19937 rng(7);
  for (int step = 0; step < 100; ++step) {
    if (shadow.empty() || rng() % 3 != 0) {
      auto id = fabric.CreateService("n0", MemberSpec::Netns(step + 1), {Vni(1024 + step)});
      ASSERT_TRUE(id.ok());
      ASSERT_TRUE(shadow.insert(*id).second);
    } else {
      auto it = shadow.begin();
      std::advance(it, rng() % shadow.size());
      ASSERT_TRUE(fabric.DeleteService("n0", *it).ok());
      shadow.erase(it);
    }
    std::set<ServiceId> listed;
    const auto services = *fabric.ListServices("n0");
    for (const auto& svc : services) listed.insert(svc.id);
    ASSERT_EQ(listed, shadow) << "step " << step;
  }
}

// Concurrent service churn never lets two endpoints on different VNIs talk.
TEST(FabricConcurrencyTest, IsolationHoldsUnderServiceChurn) {
  Fabric fabric{"n0", "n1"};
  ASSERT_TRUE(fabric.CreateService("n0", MemberSpec::Netns(1), {100}).ok());
  ASSERT_TRUE(fabric.CreateService("n1", MemberSpec::Netns(2), {101}).ok());
  auto a = *fabric.AllocEndpoint("n0", {.netns_inode = 1}, 100);
  auto b = *fabric.AllocEndpoint("n1", {.netns_inode = 2}, 101);

  std::atomic<bool> stop{false};
  std::thread churn([&] {
    int i = 0;
    while (!stop.load()) {
      auto id = fabric.CreateService(i % 2 ? "n0" : "n1", MemberSpec::Netns(1 + i % 2), {100, 101});
      if (id.ok()) (void)fabric.DeleteService(i % 2 ? "n0" : "n1", *id);
      ++i;
    }
  });
  for (int i = 0; i < 20000; ++i) {
    ASSERT_FALSE(fabric.Transmit(a, b, Bytes("x")).delivered());
    ASSERT_FALSE(fabric.Transmit(b, a, Bytes("x")).delivered());
  }
  stop = true;
  churn.join();
}

}  // namespace
}  // namespace vnimesh::cxi
