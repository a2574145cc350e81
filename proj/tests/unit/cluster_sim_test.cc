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

#include "vnimesh/sim/cluster.h"

#include <atomic>
#include <random>
#include <set>
#include <sstream>

#include "gmock/gmock.h"
#include "fmt/format.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "nlohmann/json.hpp"
#include "support/temp_dir.h"
#include "vnimesh/common/errors.h"
#include "vnimesh/cxi/control.h"
#include "vnimesh/endpoint/webhook.h"
#include "vnimesh/sim/environment.h"
#include "vnimesh/sim/json.h"
#include "vnimesh/sim/management_api.h"
#include "vnimesh/sim/scenario.h"

namespace vnimesh::sim {
namespace {

using ::testing::IsEmpty;
using ::testing::SizeIs;

ResourceObject JobObject(std::string name, std::optional<std::string> vni, std::uint32_t pods = 1,
                         std::string ns = "default") {
  ResourceObject obj;
  obj.kind = Kind::kJob;
  obj.meta.ns = std::move(ns);
  obj.meta.name = std::move(name);
  if (vni) obj.meta.annotations.emplace("vni", *vni);
  obj.job.pods = pods;
  return obj;
}

ResourceObject LongJob(std::string name, std::optional<std::string> vni, std::uint32_t pods = 1) {
  ResourceObject obj = JobObject(std::move(name), std::move(vni), pods);
  obj.job.run_seconds = std::nullopt;
  obj.job.termination_seconds = 5;
  return obj;
}

ResourceObject ClaimObject(std::string name, std::string ns = "default") {
  ResourceObject obj;
  obj.kind = Kind::kVniClaim;
  obj.meta.ns = std::move(ns);
  obj.meta.name = std::move(name);
  return obj;
}

// Forwards to the in-process endpoint unless switched off, and counts calls.
class SwitchableWebhook final : public endpoint::Webhook {
 public:
  SwitchableWebhook(endpoint::VniEndpoint& endpoint, const Clock& clock) : inner_(endpoint, clock) {}

  absl::StatusOr<endpoint::SyncResponse> Sync(const endpoint::SyncRequest& req) override {
    ++calls;
    if (down) return MakeError(ErrorKind::kWebhookUnavailable, "down");
    return inner_.Sync(req);
  }
  absl::StatusOr<endpoint::FinalizeResponse> Finalize(const endpoint::SyncRequest& req) override {
    ++calls;
    if (down) return MakeError(ErrorKind::kWebhookUnavailable, "down");
    return inner_.Finalize(req);
  }

  std::atomic<bool> down{false};
  std::atomic<int> calls{0};

 private:
  endpoint::InProcessWebhook inner_;
};

class LateManagement final : public cni::ManagementClient {
 public:
  absl::StatusOr<cni::PodInfo> GetPod(const std::string& uid) override {
    auto info = cluster->PodInfoFor(uid);
    if (!info) return MakeError(ErrorKind::kNotFound, uid);
    return *info;
  }
  Cluster* cluster = nullptr;
};

// A cluster wired to the real endpoint, store, fabric and plugin, all in
// process and on a virtual clock.
class ClusterTest : public ::testing::Test {
 protected:
  ClusterTest()
      : store_(*store::VniStore::Open({.clock = &clock_})),
        endpoint_(*store_),
        webhook_(endpoint_, clock_),
        fabric_({"n0", "n1"}),
        cxi_(fabric_),
        driver_(CniSettings{.state_root = dir_.path()}, cni::Clients{&mgmt_, &cxi_}),
        cluster_(ClusterOptions{}, clock_, &webhook_, driver_) {
    mgmt_.cluster = &cluster_;
  }

  ClusterSummary Quiesce(std::size_t max_steps = 100000) {
    auto s = cluster_.RunUntilQuiescent(clock_, max_steps);
    EXPECT_TRUE(s.ok()) << s.status();
    return s.ok() ? *s : ClusterSummary{};
  }

  std::vector<cxi::CxiService> Services(const NodeId& node) {
    auto list = fabric_.ListServices(node);
    EXPECT_TRUE(list.ok());
    return list.ok() ? *list : std::vector<cxi::CxiService>{};
  }

  std::vector<Pod> PodsOf(const std::string& job) {
    std::vector<Pod> out;
    for (Pod& p : cluster_.ListPods()) {
      if (p.job == job) out.push_back(std::move(p));
    }
    return out;
  }

  std::size_t CountAudit(store::AuditOp op) {
    std::size_t n = 0;
    auto log = store_->AuditLog();
    for (const auto& rec : *log) n += rec.op == op && rec.ok();
    return n;
  }

  vnimesh::testing::TempDir dir_;
  VirtualClock clock_;
  std::unique_ptr<store::VniStore> store_;
  endpoint::VniEndpoint endpoint_;
  SwitchableWebhook webhook_;
  cxi::Fabric fabric_;
  cxi::LocalCxiControl cxi_;
  LateManagement mgmt_;
  InProcessCniDriver driver_;
  Cluster cluster_;
};

TEST_F(ClusterTest, SubmitAnnotatedJobIsPendingAndQueued) {
  const std::size_t before = cluster_.ControllerQueueLength();
  auto uid = cluster_.Submit(JobObject("vni-test-job", "true"));
  ASSERT_TRUE(uid.ok()) << uid.status();
  EXPECT_THAT(*uid, ::testing::MatchesRegex("00000000-0000-4000-8000-[0-9a-f]{12}"));
  auto job = cluster_.GetJob("default", "vni-test-job");
  ASSERT_TRUE(job);
  EXPECT_EQ(job->phase, Phase::kPending);
  EXPECT_EQ(cluster_.ControllerQueueLength(), before + 1);
  EXPECT_EQ(job->admission.job_ref, "job:default/vni-test-job");
}

TEST_F(ClusterTest, DuplicateNameInNamespaceIsRejected) {
  ASSERT_TRUE(cluster_.Submit(JobObject("a", std::nullopt)).ok());
  EXPECT_TRUE(Is(cluster_.Submit(JobObject("a", "true")).status(), ErrorKind::kDuplicate));
  EXPECT_TRUE(cluster_.Submit(JobObject("a", std::nullopt, 1, "other")).ok());
  ASSERT_TRUE(cluster_.Submit(ClaimObject("a")).ok());
  EXPECT_TRUE(Is(cluster_.Submit(ClaimObject("a")).status(), ErrorKind::kDuplicate));
}

TEST_F(ClusterTest, PodsAndVniCrdsCannotBeSubmitted) {
  ResourceObject pod;
  pod.kind = Kind::kPod;
  pod.meta.name = "p";
  EXPECT_FALSE(cluster_.Submit(pod).ok());
  pod.kind = Kind::kVniCrd;
  EXPECT_FALSE(cluster_.Submit(pod).ok());
}

TEST_F(ClusterTest, UnannotatedJobNeverReachesTheWebhook) {
  ASSERT_TRUE(cluster_.Submit(LongJob("plain", std::nullopt, 2)).ok());
  for (int i = 0; i < 50; ++i) {
    cluster_.ReconcileStep(clock_.Now());
    clock_.Advance(0.1);
  }
  EXPECT_EQ(webhook_.calls, 0);
  EXPECT_EQ(cluster_.ControllerQueueLength(), 0u);
  for (const Pod& p : PodsOf("plain")) EXPECT_EQ(p.phase, Phase::kRunning);
  EXPECT_THAT(cluster_.ListVniCrds(), IsEmpty());
  EXPECT_EQ(fabric_.TotalServices(), 0u);
}

TEST_F(ClusterTest, AnnotatedJobRunsWithinThreeStepsOnceAdmitted) {
  // No admission cost: the sandbox may start as soon as the VniCrd exists.
  Cluster cluster(ClusterOptions{.admission = {0, 0, 0}}, clock_, &webhook_, driver_);
  mgmt_.cluster = &cluster;
  ASSERT_TRUE(cluster.Submit(LongJob("j", "true")).ok());
  for (int i = 0; i < 3; ++i) cluster.ReconcileStep(clock_.Now());

  auto crds = cluster.ListVniCrds("job:default/j");
  ASSERT_THAT(crds, SizeIs(1));
  const Vni vni = crds[0].crd.vni;
  auto job = cluster.GetJob("default", "j");
  ASSERT_TRUE(job && job->pods.size() == 1);
  auto pod = cluster.GetPod(job->pods[0]);
  ASSERT_TRUE(pod);
  EXPECT_EQ(pod->phase, Phase::kRunning);
  auto services = Services(pod->node);
  ASSERT_THAT(services, SizeIs(1));
  EXPECT_EQ(services[0].member, cxi::MemberSpec::Netns(pod->netns_inode));
  EXPECT_EQ(services[0].vnis, std::set<Vni>{vni});
  EXPECT_GE(pod->netns_inode, 4026532000u);

  ASSERT_TRUE(cluster.RequestDelete(Kind::kJob, "default", "j").ok());
  ASSERT_TRUE(cluster.RunUntilQuiescent(clock_, 10000).ok());
}

TEST_F(ClusterTest, EndpointDownKeepsPodsPendingWithoutServices) {
  webhook_.down = true;
  ASSERT_TRUE(cluster_.Submit(LongJob("j", "true", 2)).ok());
  for (int i = 0; i < 200; ++i) {
    cluster_.ReconcileStep(clock_.Now());
    clock_.Advance(0.5);
  }
  EXPECT_GT(webhook_.calls, 100);
  EXPECT_TRUE(cluster_.HasPendingWork());
  for (const Pod& p : PodsOf("j")) EXPECT_NE(p.phase, Phase::kRunning);
  EXPECT_EQ(fabric_.TotalServices(), 0u);
  EXPECT_THAT(cluster_.ListVniCrds(), IsEmpty());
  EXPECT_TRUE(Is(cluster_.RunUntilQuiescent(clock_, 50).status(), ErrorKind::kNonQuiescent));

  webhook_.down = false;
  ASSERT_TRUE(cluster_.RequestDelete(Kind::kJob, "default", "j").ok());
  auto s = Quiesce();
  EXPECT_EQ(s.jobs_live, 0u);
  EXPECT_EQ(fabric_.TotalServices(), 0u);
}

TEST_F(ClusterTest, EchoJobCompletesAndLeavesNothingBehind) {
  ResourceObject job = JobObject("echo", "true");
  job.job.ttl_seconds_after_finished = 0;
  ASSERT_TRUE(cluster_.Submit(job).ok());
  auto s = Quiesce();
  EXPECT_EQ(s.jobs_succeeded, 1u);
  EXPECT_EQ(s.jobs_live, 0u);
  EXPECT_EQ(s.vnicrds, 0u);
  EXPECT_EQ(fabric_.TotalServices(), 0u);
  EXPECT_EQ(*store_->CountAllocated(), 0u);
  EXPECT_EQ(CountAudit(store::AuditOp::kAcquire), 1u);
  EXPECT_EQ(CountAudit(store::AuditOp::kRelease), 1u);

  auto records = cluster_.AdmissionRecords();
  ASSERT_THAT(records, SizeIs(1));
  const AdmissionRecord& r = records[0];
  ASSERT_TRUE(r.started_at && r.completed_at && r.deleted_at);
  EXPECT_LE(r.submitted_at, *r.started_at);
  EXPECT_LE(*r.started_at, *r.completed_at);
  EXPECT_LE(*r.completed_at, *r.deleted_at);
}

TEST_F(ClusterTest, CompletedJobWithoutTtlStaysUntilDeleted) {
  ASSERT_TRUE(cluster_.Submit(JobObject("echo", "true")).ok());
  auto s = Quiesce();
  EXPECT_EQ(s.jobs_succeeded, 1u);
  EXPECT_EQ(s.jobs_live, 1u);
  EXPECT_EQ(cluster_.GetJob("default", "echo")->phase, Phase::kSucceeded);
  // The container exited, so its CXI service is gone, but the VNI stays
  // with the job until it is deleted.
  EXPECT_EQ(fabric_.TotalServices(), 0u);
  EXPECT_EQ(*store_->CountAllocated(), 1u);
  ASSERT_TRUE(cluster_.RequestDelete(Kind::kJob, "default", "echo").ok());
  Quiesce();
  EXPECT_EQ(*store_->CountAllocated(), 0u);
}

TEST_F(ClusterTest, JobsOnOneClaimRunConcurrentlyWithOneVni) {
  ASSERT_TRUE(cluster_.Submit(ClaimObject("shared")).ok());
  for (int i = 0; i < 10; ++i) {
    ASSERT_TRUE(cluster_.Submit(LongJob(fmt::format("user-{}", i), "shared")).ok());
  }
  Quiesce();
  std::set<Vni> vnis;
  std::set<Vni> service_vnis;
  for (const Pod& p : cluster_.ListPods()) {
    EXPECT_EQ(p.phase, Phase::kRunning) << p.meta.name;
  }
  for (const Job& j : cluster_.ListJobs()) {
    ASSERT_TRUE(j.vni_status && j.vni_status->vni) << j.meta.name;
    vnis.insert(*j.vni_status->vni);
  }
  for (const NodeId& n : {"n0", "n1"}) {
    for (const auto& svc : Services(n)) service_vnis.insert(svc.vnis.begin(), svc.vnis.end());
  }
  EXPECT_THAT(vnis, SizeIs(1));
  EXPECT_EQ(service_vnis, vnis);
  EXPECT_EQ(fabric_.TotalServices(), 10u);
  EXPECT_EQ(cluster_.GetClaim("default", "shared")->vni_status->vni, *vnis.begin());
  EXPECT_EQ(CountAudit(store::AuditOp::kAcquire), 1u);
}

TEST_F(ClusterTest, EmptyClusterIsQuiescentInOneStep) {
  auto s = Quiesce();
  EXPECT_EQ(s.steps, 1u);
  EXPECT_FALSE(cluster_.HasPendingWork());
  EXPECT_EQ(cluster_.ReconcileStep(clock_.Now()), 0u);
}

TEST_F(ClusterTest, DeletingRunningJobTerminatesPodsThenFinalizes) {
  ASSERT_TRUE(cluster_.Submit(LongJob("j", "true", 2)).ok());
  Quiesce();
  ASSERT_EQ(fabric_.TotalServices(), 2u);

  std::vector<Event> events;
  cluster_.SetEventSink([&](const Event& e) { events.push_back(e); });
  const Timestamp t0 = clock_.Now();
  ASSERT_TRUE(cluster_.RequestDelete(Kind::kJob, "default", "j").ok());
  cluster_.ReconcileStep(clock_.Now());
  for (const Pod& p : PodsOf("j")) EXPECT_EQ(p.phase, Phase::kTerminating);
  EXPECT_EQ(cluster_.GetJob("default", "j")->phase, Phase::kTerminating);
  EXPECT_EQ(*store_->CountAllocated(), 1u);

  Quiesce();
  EXPECT_FALSE(cluster_.GetJob("default", "j"));
  EXPECT_EQ(fabric_.TotalServices(), 0u);
  EXPECT_EQ(*store_->CountAllocated(), 0u);

  Timestamp last_pod_deleted = 0;
  Timestamp job_deleted = 0;
  for (const Event& e : events) {
    if (e.to != Phase::kDeleted) continue;
    if (e.kind == Kind::kPod) last_pod_deleted = std::max(last_pod_deleted, e.t);
    if (e.kind == Kind::kJob) job_deleted = e.t;
  }
  EXPECT_GT(last_pod_deleted, t0);
  EXPECT_LE(last_pod_deleted - t0, 30.0);
  EXPECT_GE(job_deleted, last_pod_deleted);
}

TEST_F(ClusterTest, StragglersAreKilledAtTheGracePeriod) {
  ResourceObject job = LongJob("slow", "true");
  job.job.grace_period_seconds = 30;
  job.job.termination_seconds = 1000;  // ignores SIGTERM
  ASSERT_TRUE(cluster_.Submit(job).ok());
  Quiesce();
  const Timestamp t0 = clock_.Now();
  ASSERT_TRUE(cluster_.RequestDelete(Kind::kJob, "default", "slow").ok());
  ASSERT_TRUE(cluster_.RunUntil(clock_, t0 + 29.9, 100000).ok());
  EXPECT_THAT(PodsOf("slow"), SizeIs(1));
  EXPECT_EQ(fabric_.TotalServices(), 1u);
  Quiesce();
  EXPECT_LE(clock_.Now() - t0, 30.0 + 0.2);
  EXPECT_EQ(fabric_.TotalServices(), 0u);
  EXPECT_EQ(*store_->CountAllocated(), 0u);
}

TEST_F(ClusterTest, ClaimWithActiveUsersStallsInTerminating) {
  ASSERT_TRUE(cluster_.Submit(ClaimObject("c")).ok());
  ASSERT_TRUE(cluster_.Submit(LongJob("u", "c")).ok());
  Quiesce();
  ASSERT_TRUE(cluster_.RequestDelete(Kind::kVniClaim, "default", "c").ok());
  for (int i = 0; i < 20; ++i) {
    cluster_.ReconcileStep(clock_.Now());
    clock_.Advance(1);
  }
  auto claim = cluster_.GetClaim("default", "c");
  ASSERT_TRUE(claim);
  EXPECT_EQ(claim->phase, Phase::kTerminating);
  EXPECT_EQ(*store_->CountAllocated(), 1u);
  EXPECT_TRUE(cluster_.HasPendingWork());

  ASSERT_TRUE(cluster_.RequestDelete(Kind::kJob, "default", "u").ok());
  Quiesce();
  EXPECT_FALSE(cluster_.GetClaim("default", "c"));
  EXPECT_EQ(*store_->CountAllocated(), 0u);
  EXPECT_EQ(fabric_.TotalServices(), 0u);
}

TEST_F(ClusterTest, DeleteUnknownIsNotFound) {
  EXPECT_TRUE(Is(cluster_.RequestDelete(Kind::kJob, "default", "nope"), ErrorKind::kNotFound));
  EXPECT_TRUE(Is(cluster_.RequestDelete(Kind::kVniClaim, "default", "nope"), ErrorKind::kNotFound));
}

TEST_F(ClusterTest, GracePeriodAboveLimitBlocksLaunch) {
  ResourceObject job = LongJob("long-grace", "true");
  job.job.grace_period_seconds = 120;
  ASSERT_TRUE(cluster_.Submit(job).ok());
  Quiesce();
  for (const Pod& p : PodsOf("long-grace")) {
    EXPECT_EQ(p.phase, Phase::kPending);
    EXPECT_THAT(p.last_error, ::testing::HasSubstr("GracePeriodTooLong"));
  }
  EXPECT_EQ(fabric_.TotalServices(), 0u);
}

TEST_F(ClusterTest, OutOfBandVniCrdDeletionIsRecreated) {
  ASSERT_TRUE(cluster_.Submit(LongJob("j", "true")).ok());
  Quiesce();
  auto before = cluster_.ListVniCrds("job:default/j");
  ASSERT_THAT(before, SizeIs(1));
  ASSERT_TRUE(cluster_.RequestDelete(Kind::kVniCrd, "default", before[0].meta.name).ok());
  Quiesce();
  auto after = cluster_.ListVniCrds("job:default/j");
  ASSERT_THAT(after, SizeIs(1));
  EXPECT_EQ(after[0].crd.vni, before[0].crd.vni);
  EXPECT_EQ(CountAudit(store::AuditOp::kAcquire), 1u);
}

TEST_F(ClusterTest, TopologySpreadUsesDistinctNodes) {
  ResourceObject job = LongJob("spread", "true", 2);
  job.job.topology_spread = true;
  ASSERT_TRUE(cluster_.Submit(job).ok());
  Quiesce();
  std::set<NodeId> nodes;
  for (const Pod& p : PodsOf("spread")) nodes.insert(p.node);
  EXPECT_EQ(nodes, (std::set<NodeId>{"n0", "n1"}));
  EXPECT_THAT(Services("n0"), SizeIs(1));
  EXPECT_THAT(Services("n1"), SizeIs(1));
}

TEST_F(ClusterTest, NetnsInodesAreUnique) {
  for (int i = 0; i < 20; ++i) {
    ASSERT_TRUE(cluster_.Submit(LongJob(fmt::format("j{}", i), std::nullopt, 3)).ok());
  }
  Quiesce();
  std::set<std::uint64_t> inodes;
  for (const Pod& p : cluster_.ListPods()) inodes.insert(p.netns_inode);
  EXPECT_THAT(inodes, SizeIs(60));
  EXPECT_EQ(*inodes.begin(), 4026532000u);
}

// Random submissions and deletions, checking the launch-gating invariant after
// every step: a Running pod of an annotated job has a live VniCrd for its
// parent and a NETNS service for its sandbox carrying that VNI.
TEST_F(ClusterTest, LaunchGatingHoldsThroughoutRandomTraces) {
  std::mt19937_64 rng(42);
  std::vector<std::string> live;
  ASSERT_TRUE(cluster_.Submit(ClaimObject("c")).ok());
  int next = 0;
  for (int step = 0; step < 400; ++step) {
    const int action = static_cast<int>(rng() % 6);
    if (action == 0 || live.empty()) {
      std::string name = fmt::format("job-{}", next++);
      const char* vni = rng() % 3 == 0 ? nullptr : (rng() % 2 ? "true" : "c");
      ResourceObject job = LongJob(name, vni ? std::optional<std::string>(vni) : std::nullopt,
                                   1 + static_cast<std::uint32_t>(rng() % 2));
      job.job.termination_seconds = static_cast<double>(rng() % 40);
      ASSERT_TRUE(cluster_.Submit(job).ok());
      live.push_back(name);
    } else if (action == 1) {
      const std::size_t i = rng() % live.size();
      ASSERT_TRUE(cluster_.RequestDelete(Kind::kJob, "default", live[i]).ok());
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
    }
    cluster_.ReconcileStep(clock_.Now());
    clock_.Advance(0.25);

    for (const Job& job : cluster_.ListJobs()) {
      if (!job.meta.annotations.contains("vni")) continue;
      auto crds = cluster_.ListVniCrds("job:default/" + job.meta.name);
      for (const std::string& uid : job.pods) {
        auto pod = cluster_.GetPod(uid);
        if (!pod || pod->phase != Phase::kRunning) continue;
        ASSERT_THAT(crds, SizeIs(1)) << job.meta.name;
        bool matched = false;
        for (const auto& svc : Services(pod->node)) {
          matched |= svc.member == cxi::MemberSpec::Netns(pod->netns_inode) &&
                     svc.vnis.contains(crds[0].crd.vni);
        }
        ASSERT_TRUE(matched) << pod->meta.name;
      }
    }
  }
  for (const std::string& name : live) {
    ASSERT_TRUE(cluster_.RequestDelete(Kind::kJob, "default", name).ok());
  }
  ASSERT_TRUE(cluster_.RequestDelete(Kind::kVniClaim, "default", "c").ok());
  Quiesce();
  EXPECT_EQ(*store_->CountAllocated(), 0u);
  EXPECT_EQ(fabric_.TotalServices(), 0u);
  for (const auto& rec : *store_->Snapshot()) EXPECT_THAT(rec.users, IsEmpty());
}

// Every pod of a deleted annotated job is gone within the 30 s grace bound
// and had its CNI DEL issued.
TEST_F(ClusterTest, StragglerBoundOverRandomTerminationTimes) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 15; ++i) {
    ResourceObject job = LongJob(fmt::format("j{}", i), "true", 2);
    job.job.termination_seconds = static_cast<double>(rng() % 100);
    ASSERT_TRUE(cluster_.Submit(job).ok());
  }
  Quiesce();
  const std::size_t dels_before = cluster_.stats().cni_del_calls;
  std::map<std::string, Timestamp> deleted_at;
  std::map<std::string, Timestamp> requested;
  cluster_.SetEventSink([&](const Event& e) {
    if (e.kind == Kind::kPod && e.to == Phase::kDeleted) deleted_at[e.name] = e.t;
  });
  for (int i = 0; i < 15; ++i) {
    const std::string name = fmt::format("j{}", i);
    for (const Pod& p : PodsOf(name)) requested[p.meta.name] = clock_.Now();
    ASSERT_TRUE(cluster_.RequestDelete(Kind::kJob, "default", name).ok());
    cluster_.ReconcileStep(clock_.Now());
    clock_.Advance(static_cast<double>(rng() % 5));
  }
  Quiesce();
  ASSERT_EQ(deleted_at.size(), 30u);
  for (const auto& [pod, t] : deleted_at) {
    EXPECT_LE(t - requested.at(pod), 30.0 + 1e-9) << pod;
  }
  EXPECT_EQ(cluster_.stats().cni_del_calls - dels_before, 30u);
  EXPECT_EQ(fabric_.TotalServices(), 0u);
}

TEST_F(ClusterTest, ConcurrentSubmissionsFromManyThreads) {
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([this, t] {
      for (int i = 0; i < 10; ++i) {
        ResourceObject job = JobObject(fmt::format("t{}-{}", t, i), "true");
        job.job.ttl_seconds_after_finished = 0;
        EXPECT_TRUE(cluster_.Submit(job).ok());
      }
    });
  }
  for (auto& th : threads) th.join();
  auto s = Quiesce();
  EXPECT_EQ(s.jobs_submitted, 80u);
  EXPECT_EQ(s.jobs_succeeded, 80u);
  EXPECT_EQ(s.jobs_live, 0u);
  EXPECT_EQ(CountAudit(store::AuditOp::kAcquire), 80u);
  EXPECT_EQ(CountAudit(store::AuditOp::kRelease), 80u);
}

TEST_F(ClusterTest, EventsAreMonotoneAndRoundTripAsJsonLines) {
  std::ostringstream log;
  JsonLinesWriter writer(log);
  cluster_.SetEventSink([&](const Event& e) { writer(e); });
  ResourceObject job = JobObject("echo", "true", 2);
  job.job.ttl_seconds_after_finished = 0;
  ASSERT_TRUE(cluster_.Submit(job).ok());
  Quiesce();

  std::istringstream in(log.str());
  std::string line;
  Timestamp last = 0;
  std::vector<Event> events;
  while (std::getline(in, line)) {
    auto e = EventFromJson(nlohmann::json::parse(line));
    ASSERT_TRUE(e.ok()) << line;
    EXPECT_GE(e->t, last);
    last = e->t;
    EXPECT_EQ(ToJson(*e).dump(), line);
    events.push_back(*e);
  }
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.front().kind, Kind::kJob);
  EXPECT_EQ(events.front().to, Phase::kPending);
  EXPECT_EQ(events.back().kind, Kind::kJob);
  EXPECT_EQ(events.back().to, Phase::kDeleted);
}

TEST(ResourceJsonTest, ObjectsRoundTrip) {
  ResourceObject job = LongJob("j", "shared", 3);
  job.meta.ns = "team-a";
  job.meta.annotations["owner"] = "alice";
  job.job.grace_period_seconds = 12;
  job.job.ttl_seconds_after_finished = 4;
  job.job.topology_spread = true;
  auto back = ResourceObjectFromJson(ToJson(job));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->kind, job.kind);
  EXPECT_EQ(back->meta.ns, job.meta.ns);
  EXPECT_EQ(back->meta.name, job.meta.name);
  EXPECT_EQ(back->meta.annotations, job.meta.annotations);
  EXPECT_EQ(back->job, job.job);

  auto claim = ResourceObjectFromJson(ToJson(ClaimObject("c", "ns")));
  ASSERT_TRUE(claim.ok());
  EXPECT_EQ(claim->kind, Kind::kVniClaim);

  EXPECT_FALSE(ResourceObjectFromJson(nlohmann::json::parse(R"({"kind":"Job"})")).ok());
  EXPECT_FALSE(ResourceObjectFromJson(nlohmann::json::parse(R"({"kind":"Nope","metadata":{"name":"x"}})")).ok());
}

// Management API over HTTP.
class ManagementApiTest : public ClusterTest {
 protected:
  void SetUp() override {
    auto port = server_.Start("127.0.0.1", 0);
    ASSERT_TRUE(port.ok()) << port.status();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", *port);
  }

  nlohmann::json Get(const std::string& path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path;
    return nlohmann::json::parse(res->body, nullptr, false);
  }

  ManagementApiServer server_{cluster_};
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ManagementApiTest, PodOfAnnotatedJobShowsAnnotationsAndBoundVni) {
  ASSERT_TRUE(cluster_.Submit(LongJob("j", "true")).ok());
  Quiesce();
  const std::string uid = cluster_.GetJob("default", "j")->pods.at(0);
  nlohmann::json pod = Get("/api/pods/" + uid);
  EXPECT_EQ(pod["uid"], uid);
  EXPECT_EQ(pod["job"]["name"], "j");
  EXPECT_EQ(pod["job"]["annotations"]["vni"], "true");
  const Vni vni = cluster_.ListVniCrds("job:default/j").at(0).crd.vni;
  EXPECT_EQ(pod["vni"], vni);

  nlohmann::json job = Get("/api/jobs/default/j");
  EXPECT_EQ(job["metadata"]["annotations"]["vni"], "true");
  nlohmann::json crds = Get("/api/vnicrds?owner=job:default/j");
  ASSERT_EQ(crds.size(), 1u);
  EXPECT_EQ(crds[0]["spec"]["vni"], vni);
}

TEST_F(ManagementApiTest, UnknownObjectsAre404) {
  Get("/api/pods/00000000-0000-4000-8000-000000000999", 404);
  Get("/api/jobs/default/missing", 404);
  Get("/api/claims/default/missing", 404);
}

TEST_F(ManagementApiTest, AnnotationsRoundTripExactly) {
  std::mt19937_64 rng(3);
  for (int n : {0, 1, 7, 40}) {
    ResourceObject job = LongJob(fmt::format("a{}", n), std::nullopt);
    for (int i = 0; i < n; ++i) {
      job.meta.annotations[fmt::format("example.com/k{}", i)] = fmt::format("v{}", rng() % 1000);
    }
    ASSERT_TRUE(cluster_.Submit(job).ok());
    Quiesce();
    const std::string uid = cluster_.GetJob("default", job.meta.name)->pods.at(0);
    nlohmann::json pod = Get("/api/pods/" + uid);
    using Annotations = std::map<std::string, std::string>;
    EXPECT_EQ(pod["job"]["annotations"].get<Annotations>(), job.meta.annotations);
    nlohmann::json j = Get("/api/jobs/default/" + job.meta.name);
    EXPECT_EQ(j["metadata"]["annotations"].size(), static_cast<std::size_t>(n));
  }
}

// Full environments.
EnvironmentOptions Virtual() {
  EnvironmentOptions o;
  o.quarantine_seconds = 30;
  return o;
}

TEST(EnvironmentTest, CrossTenantTransmitIsDroppedByVniMismatch) {
  auto env = Environment::Create(Virtual());
  ASSERT_TRUE(env.ok()) << env.status();
  Cluster& cluster = (*env)->cluster();
  for (const char* name : {"tenant-a", "tenant-b"}) {
    ResourceObject job = LongJob(name, "true", 2);
    job.job.topology_spread = true;
    ASSERT_TRUE(cluster.Submit(job).ok());
  }
  ASSERT_TRUE((*env)->RunUntilQuiescent().ok());

  struct Ep {
    std::string job;
    cxi::EndpointHandle handle;
  };
  std::vector<Ep> eps;
  std::set<Vni> vnis;
  for (const Pod& pod : cluster.ListPods()) {
    ASSERT_EQ(pod.phase, Phase::kRunning);
    const Vni vni = *cluster.GetJob("default", pod.job)->vni_status->vni;
    vnis.insert(vni);
    auto h = (*env)->fabric().AllocEndpoint(pod.node, {.uid = 1000, .gid = 1000, .netns_inode = pod.netns_inode}, vni);
    ASSERT_TRUE(h.ok()) << h.status();
    eps.push_back({pod.job, *h});
  }
  EXPECT_THAT(vnis, SizeIs(2));
  const std::byte payload[4] = {};
  for (const Ep& a : eps) {
    for (const Ep& b : eps) {
      if (&a == &b) continue;
      auto r = (*env)->fabric().Transmit(a.handle, b.handle, payload);
      if (a.job == b.job) {
        EXPECT_TRUE(r.delivered());
      } else {
        EXPECT_EQ(r, cxi::TransmitResult::Dropped(cxi::DropReason::kVniMismatch));
      }
    }
  }
  for (const Ep& e : eps) ASSERT_TRUE((*env)->fabric().FreeEndpoint(e.handle).ok());
}

TEST(EnvironmentTest, EndStateIsCleanAfterDeletesAndQuarantine) {
  auto env = Environment::Create(Virtual());
  ASSERT_TRUE(env.ok());
  Cluster& cluster = (*env)->cluster();
  ASSERT_TRUE(cluster.Submit(ClaimObject("c")).ok());
  for (int i = 0; i < 6; ++i) {
    ASSERT_TRUE(cluster.Submit(LongJob(fmt::format("j{}", i), i % 2 ? "c" : "true", 2)).ok());
  }
  ASSERT_TRUE((*env)->RunUntilQuiescent().ok());
  for (int i = 0; i < 6; ++i) ASSERT_TRUE(cluster.RequestDelete(Kind::kJob, "default", fmt::format("j{}", i)).ok());
  ASSERT_TRUE(cluster.RequestDelete(Kind::kVniClaim, "default", "c").ok());
  auto s = (*env)->RunUntilQuiescent();
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->vnis_allocated, 0u);
  EXPECT_EQ(s->vnis_quarantined, 4u);
  EXPECT_EQ(s->cxi_services, 0u);
  ASSERT_TRUE((*env)->RunUntil((*env)->clock().Now() + 31).ok());
  auto after = (*env)->Summarize();
  EXPECT_EQ(after->vnis_quarantined, 4u);  // quarantine lapses lazily
  auto vni = (*env)->store().Acquire("job:default/next", (*env)->clock().Now());
  ASSERT_TRUE(vni.ok());
  for (const NodeId& n : (*env)->fabric().Nodes()) {
    EXPECT_THAT(*(*env)->fabric().ListServices(n), IsEmpty());
  }
}

TEST(EnvironmentTest, DisabledVniPathBypassesTheEndpoint) {
  EnvironmentOptions o = Virtual();
  o.vni_enabled = false;
  auto env = Environment::Create(o);
  ASSERT_TRUE(env.ok());
  ASSERT_TRUE((*env)->cluster().Submit(JobObject("j", std::nullopt)).ok());
  auto s = (*env)->RunUntilQuiescent();
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->cluster.jobs_succeeded, 1u);
  EXPECT_EQ((*env)->cluster().stats().sync_calls, 0u);
}

TEST(EnvironmentTest, HttpTransportsAndPluginBinary) {
  EnvironmentOptions o = Virtual();
  o.webhook = Transport::kHttp;
  o.plugin = Transport::kHttp;
  o.cni_binary = VNIMESH_CXI_CNI_BINARY;
  auto env = Environment::Create(o);
  ASSERT_TRUE(env.ok()) << env.status();
  EXPECT_FALSE((*env)->webhook_url().empty());
  EXPECT_FALSE((*env)->management_url().empty());
  EXPECT_FALSE((*env)->cxi_url().empty());
  Cluster& cluster = (*env)->cluster();
  ASSERT_TRUE(cluster.Submit(LongJob("j", "true", 2)).ok());
  ASSERT_TRUE((*env)->RunUntilQuiescent().ok());
  EXPECT_EQ((*env)->fabric().TotalServices(), 2u);
  for (const Pod& p : cluster.ListPods()) EXPECT_EQ(p.phase, Phase::kRunning);
  ASSERT_TRUE(cluster.RequestDelete(Kind::kJob, "default", "j").ok());
  auto s = (*env)->RunUntilQuiescent();
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->cxi_services, 0u);
  EXPECT_EQ(s->vnis_allocated, 0u);
}

TEST(EnvironmentTest, WallClockLoopAdmitsAndDeletes) {
  EnvironmentOptions o;
  o.clock = ClockMode::kWall;
  o.cluster.admission = {0.01, 0.01, 0.001};
  auto env = Environment::Create(o);
  ASSERT_TRUE(env.ok());
  (*env)->StartLoop();
  for (int i = 0; i < 5; ++i) {
    ResourceObject job = JobObject(fmt::format("j{}", i), "true");
    job.job.ttl_seconds_after_finished = 0;
    ASSERT_TRUE((*env)->cluster().Submit(job).ok());
  }
  EXPECT_TRUE((*env)->WaitQuiescent(30));
  (*env)->StopLoop();
  auto s = (*env)->Summarize();
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->cluster.jobs_succeeded, 5u);
  EXPECT_EQ(s->vnis_allocated, 0u);
  EXPECT_EQ(s->cxi_services, 0u);
}

TEST(ScenarioTest, ParsesAndReplaysInVirtualTime) {
  auto scenario = ScenarioFromJson(nlohmann::json::parse(R"({
    "nodes": ["a", "b", "c"],
    "seed": 9,
    "events": [
      {"at": 5, "delete": {"kind": "Job", "namespace": "default", "name": "j1"}},
      {"at": 0, "submit": {"kind": "VniClaim", "metadata": {"name": "c"}}},
      {"at": 0, "submit": {"kind": "Job", "metadata": {"name": "j1", "annotations": {"vni": "c"}},
                           "spec": {"pods": 2, "runSeconds": null}}},
      {"at": 6, "delete": {"kind": "VniClaim", "name": "c"}}
    ]})"));
  ASSERT_TRUE(scenario.ok()) << scenario.status();
  EXPECT_EQ(scenario->events.front().at, 0);
  EXPECT_EQ(scenario->events.back().at, 6);

  EnvironmentOptions o = Virtual();
  ApplyScenario(*scenario, o);
  EXPECT_EQ(o.cluster.nodes, (std::vector<NodeId>{"a", "b", "c"}));
  EXPECT_EQ(o.cluster.seed, 9u);
  auto env = Environment::Create(o);
  ASSERT_TRUE(env.ok());
  auto s = RunScenario(**env, *scenario);
  ASSERT_TRUE(s.ok()) << s.status();
  EXPECT_EQ(s->cluster.jobs_live, 0u);
  EXPECT_EQ(s->cluster.claims_live, 0u);
  EXPECT_EQ(s->vnis_allocated, 0u);
  EXPECT_EQ(s->vnis_quarantined, 1u);
  EXPECT_EQ(s->cxi_services, 0u);

  EXPECT_FALSE(ScenarioFromJson(nlohmann::json::parse(R"({"events":[{"at":0}]})")).ok());
  EXPECT_FALSE(ScenarioFromJson(nlohmann::json::parse(R"({"nodes":[]})")).ok());
}

TEST(ScenarioTest, ShippedScenariosRun) {
  for (const auto& entry : std::filesystem::directory_iterator(VNIMESH_SCENARIO_DIR)) {
    SCOPED_TRACE(entry.path().string());
    auto scenario = LoadScenario(entry.path());
    ASSERT_TRUE(scenario.ok()) << scenario.status();
    EnvironmentOptions o = Virtual();
    ApplyScenario(*scenario, o);
    auto env = Environment::Create(o);
    ASSERT_TRUE(env.ok());
    auto s = RunScenario(**env, *scenario);
    ASSERT_TRUE(s.ok()) << s.status();
    EXPECT_EQ(s->vnis_allocated, 0u);
    EXPECT_EQ(s->cxi_services, 0u);
  }
}

}  // namespace
}  // namespace vnimesh::sim
