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

#include <algorithm>
#include <chrono>
#include <set>
#include <utility>

#include "fmt/format.h"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::sim {
namespace {

// "<ErrorKind>: <message>", or just the message for foreign statuses.
std::string ErrorText(const absl::Status& status) {
  const auto kind = KindOf(status);
  if (!kind) return std::string(status.message());
  return StrCat(ErrorKindName(*kind), ": ", std::string(status.message()));
}

using Key = std::pair<std::string, std::string>;  // namespace, name

struct ParentControl {
  bool dirty = true;
  bool permanent_failure = false;
  Timestamp retry_at = 0;
};

struct JobRec {
  Job job;
  ParentControl ctl;
  bool annotated = false;
  bool pods_created = false;
  Timestamp deletion_at = 0;
};

struct ClaimRec {
  VniClaim claim;
  ParentControl ctl;
};

struct PodRec {
  Pod pod;
  Key job;
  Timestamp ready_at = 0;
  Timestamp retry_at = 0;
  std::optional<Timestamp> run_until;
  std::optional<Timestamp> terminate_at;
  bool sandbox = false;
  bool permanent_cni_error = false;
};

bool IsRetryableReason(const std::optional<std::string>& reason) {
  return reason == ErrorKindName(ErrorKind::kClaimNotFound) ||
         reason == ErrorKindName(ErrorKind::kPoolExhausted);
}

}  // namespace

struct Cluster::State {
  std::map<Key, JobRec> jobs;
  std::map<Key, ClaimRec> claims;
  std::map<Key, VniCrdObject> crds;
  std::map<std::string, PodRec> pods;

  std::vector<AdmissionRecord> records;
  std::map<std::string, std::size_t> record_index;

  std::map<NodeId, Timestamp> node_free_at;
  std::size_t rr = 0;
  std::uint64_t next_inode = 0;
  std::uint64_t next_uid = 1;
  std::mt19937_64 rng;

  ClusterStats stats;
  std::size_t jobs_succeeded = 0;
  std::uint64_t generation = 0;
  EventSink sink;

  std::string NewUid() { return fmt::format("00000000-0000-4000-8000-{:012x}", next_uid++); }

  void Emit(Timestamp t, Kind kind, const ObjectMeta& meta, std::optional<Phase> from, Phase to,
            std::string reason = {}) {
    if (!sink) return;
    sink(Event{.t = t, .kind = kind, .ns = meta.ns, .name = meta.name, .uid = meta.uid,
               .from = from, .to = to, .reason = std::move(reason)});
  }

  AdmissionRecord& Record(const std::string& ref) { return records[record_index.at(ref)]; }

  const VniCrdObject* ChildOf(const JobRec& rec) const {
    auto it = crds.find({rec.job.meta.ns, endpoint::ChildName(rec.job.meta.name)});
    if (it == crds.end()) return nullptr;
    if (it->second.owner != endpoint::JobRef(rec.job.meta.ns, rec.job.meta.name)) return nullptr;
    return &it->second;
  }

  std::vector<endpoint::VniCrd> ChildrenOf(const std::string& owner) const {
    std::vector<endpoint::VniCrd> out;
    for (const auto& [_, obj] : crds) {
      if (obj.owner == owner) out.push_back(obj.crd);
    }
    return out;
  }

  bool PodsGone(const JobRec& rec) const {
    return std::none_of(rec.job.pods.begin(), rec.job.pods.end(),
                        [&](const std::string& uid) { return pods.contains(uid); });
  }
};

struct Cluster::Work {
  struct SyncItem {
    Kind kind;
    Key key;
    bool finalize = false;
    endpoint::SyncRequest req;
    absl::StatusOr<endpoint::SyncResponse> sync = absl::UnknownError("not run");
    absl::StatusOr<endpoint::FinalizeResponse> fin = absl::UnknownError("not run");
  };
  struct CniItem {
    std::string pod_uid;
    PodSandbox sandbox;
    bool add = true;
    Phase target = Phase::kRunning;
    absl::Status result;
  };
  std::vector<SyncItem> syncs;
  std::vector<CniItem> cni;
  std::size_t changes = 0;
};

Cluster::Cluster(ClusterOptions options, const Clock& clock, endpoint::Webhook* webhook,
                 CniDriver& cni)
    : options_(std::move(options)),
      clock_(clock),
      webhook_(webhook),
      cni_(cni),
      state_(std::make_unique<State>()) {
  state_->rng.seed(options_.seed);
  state_->next_inode = options_.first_netns_inode;
  for (const NodeId& node : options_.nodes) state_->node_free_at[node] = 0;
}

Cluster::~Cluster() = default;

absl::StatusOr<std::string> Cluster::Submit(ResourceObject obj) {
  if (obj.kind != Kind::kJob && obj.kind != Kind::kVniClaim) {
    return MakeError(ErrorKind::kMalformedRequest,
                     StrCat(KindName(obj.kind), " objects are managed by the controller"));
  }
  if (obj.meta.name.empty() || obj.meta.ns.empty()) {
    return MakeError(ErrorKind::kMalformedRequest, "namespace and name are required");
  }
  if (obj.kind == Kind::kJob && obj.job.pods == 0) {
    return MakeError(ErrorKind::kMalformedRequest, "a job needs at least one pod");
  }
  const Timestamp now = clock_.Now();
  std::lock_guard lock(mu_);
  State& s = *state_;
  const Key key{obj.meta.ns, obj.meta.name};
  const bool exists = obj.kind == Kind::kJob ? s.jobs.contains(key) : s.claims.contains(key);
  if (exists) {
    return MakeError(ErrorKind::kDuplicate,
                     StrCat(KindName(obj.kind), " ", obj.meta.ns, "/", obj.meta.name, " exists"));
  }
  obj.meta.uid = s.NewUid();
  obj.meta.created_at = now;
  obj.meta.deletion_requested = false;
  if (obj.kind == Kind::kJob) {
    JobRec rec;
    rec.annotated = obj.meta.annotations.contains(std::string(endpoint::kVniAnnotation));
    rec.ctl.dirty = rec.annotated;
    rec.job.meta = obj.meta;
    rec.job.spec = obj.job;
    const std::string ref = endpoint::JobRef(obj.meta.ns, obj.meta.name);
    rec.job.admission = AdmissionRecord{.job_ref = ref, .submitted_at = now};
    s.record_index[ref] = s.records.size();
    s.records.push_back(rec.job.admission);
    s.Emit(now, Kind::kJob, obj.meta, std::nullopt, Phase::kPending, "Submitted");
    s.jobs.emplace(key, std::move(rec));
  } else {
    ClaimRec rec;
    rec.claim.meta = obj.meta;
    s.Emit(now, Kind::kVniClaim, obj.meta, std::nullopt, Phase::kPending, "Submitted");
    s.claims.emplace(key, std::move(rec));
  }
  ++s.generation;
  work_cv_.notify_all();
  return obj.meta.uid;
}

absl::Status Cluster::RequestDelete(Kind kind, const std::string& ns, const std::string& name) {
  const Timestamp now = clock_.Now();
  std::lock_guard lock(mu_);
  State& s = *state_;
  const Key key{ns, name};
  const auto not_found = [&] {
    return MakeError(ErrorKind::kNotFound, StrCat(KindName(kind), " ", ns, "/", name));
  };
  switch (kind) {
    case Kind::kJob: {
      auto it = s.jobs.find(key);
      if (it == s.jobs.end()) return not_found();
      JobRec& rec = it->second;
      if (rec.job.meta.deletion_requested) return absl::OkStatus();
      rec.job.meta.deletion_requested = true;
      rec.deletion_at = now;
      s.Emit(now, Kind::kJob, rec.job.meta, rec.job.phase, Phase::kTerminating, "DeletionRequested");
      rec.job.phase = Phase::kTerminating;
      rec.ctl.retry_at = 0;
      break;
    }
    case Kind::kVniClaim: {
      auto it = s.claims.find(key);
      if (it == s.claims.end()) return not_found();
      ClaimRec& rec = it->second;
      if (rec.claim.meta.deletion_requested) return absl::OkStatus();
      rec.claim.meta.deletion_requested = true;
      s.Emit(now, Kind::kVniClaim, rec.claim.meta, rec.claim.phase, Phase::kTerminating,
             "DeletionRequested");
      rec.claim.phase = Phase::kTerminating;
      rec.ctl.retry_at = 0;
      break;
    }
    case Kind::kVniCrd: {
      // Out-of-band deletion; the owner is resynced and recreates it.
      auto it = s.crds.find(key);
      if (it == s.crds.end()) return not_found();
      const std::string owner = it->second.owner;
      s.Emit(now, Kind::kVniCrd, it->second.meta, it->second.phase, Phase::kDeleted, "OutOfBand");
      s.crds.erase(it);
      for (auto& [_, rec] : s.jobs) {
        if (endpoint::JobRef(rec.job.meta.ns, rec.job.meta.name) == owner) {
          rec.ctl = ParentControl{};
        }
      }
      for (auto& [_, rec] : s.claims) {
        if (endpoint::ClaimRef(rec.claim.meta.ns, rec.claim.meta.name) == owner) {
          rec.ctl = ParentControl{};
        }
      }
      break;
    }
    case Kind::kPod:
      return MakeError(ErrorKind::kMalformedRequest, "pods are deleted through their job");
  }
  ++s.generation;
  work_cv_.notify_all();
  return absl::OkStatus();
}

Cluster::Work Cluster::Collect(Timestamp now) {
  State& s = *state_;
  Work work;
  const AdmissionCost& cost = options_.admission;
  std::uniform_real_distribution<double> jitter(0.0, cost.jitter);

  const auto make_sandbox = [](const PodRec& rec) {
    return PodSandbox{.pod_uid = rec.pod.meta.uid, .ns = rec.pod.meta.ns, .name = rec.pod.meta.name,
                      .node = rec.pod.node, .container_id = rec.pod.container_id,
                      .netns_inode = rec.pod.netns_inode};
  };

  std::vector<Key> removed_jobs;
  for (auto& [key, rec] : s.jobs) {
    Job& job = rec.job;
    const std::string ref = endpoint::JobRef(job.meta.ns, job.meta.name);
    if (!job.meta.deletion_requested) {
      if (!rec.pods_created) {
        rec.pods_created = true;
        ++work.changes;
        // Scheduling: round robin, or the least-loaded distinct nodes.
        std::vector<NodeId> placement;
        if (job.spec.topology_spread) {
          std::map<NodeId, std::size_t> load;
          for (const NodeId& n : options_.nodes) load[n] = 0;
          for (const auto& [_, p] : s.pods) ++load[p.pod.node];
          std::vector<NodeId> order = options_.nodes;
          std::stable_sort(order.begin(), order.end(),
                           [&](const NodeId& a, const NodeId& b) { return load[a] < load[b]; });
          for (std::uint32_t i = 0; i < job.spec.pods; ++i) placement.push_back(order[i % order.size()]);
        } else {
          for (std::uint32_t i = 0; i < job.spec.pods; ++i) {
            placement.push_back(options_.nodes[s.rr++ % options_.nodes.size()]);
          }
        }
        for (std::uint32_t i = 0; i < job.spec.pods; ++i) {
          PodRec pod;
          pod.job = key;
          pod.pod.meta = ObjectMeta{.uid = s.NewUid(), .ns = job.meta.ns,
                                    .name = StrCat(job.meta.name, "-", i), .created_at = now};
          pod.pod.job = job.meta.name;
          pod.pod.node = placement[i];
          pod.pod.grace_period_seconds = job.spec.grace_period_seconds;
          pod.ready_at = now + cost.constant + jitter(s.rng);
          job.pods.push_back(pod.pod.meta.uid);
          s.Emit(now, Kind::kPod, pod.pod.meta, std::nullopt, Phase::kPending, "Created");
          s.pods.emplace(pod.pod.meta.uid, std::move(pod));
        }
      }
      if (rec.annotated && rec.ctl.dirty && !rec.ctl.permanent_failure && rec.ctl.retry_at <= now &&
          webhook_) {
        work.syncs.push_back({.kind = Kind::kJob, .key = key,
                              .req = {endpoint::Parent{.kind = endpoint::ParentKind::kJob,
                                                       .ns = job.meta.ns, .name = job.meta.name,
                                                       .annotations = job.meta.annotations},
                                      s.ChildrenOf(ref)}});
      }
      if (job.phase == Phase::kSucceeded && job.spec.ttl_seconds_after_finished &&
          now >= *job.admission.completed_at + *job.spec.ttl_seconds_after_finished) {
        job.meta.deletion_requested = true;
        rec.deletion_at = now;
        s.Emit(now, Kind::kJob, job.meta, job.phase, Phase::kTerminating, "TTLExpired");
        job.phase = Phase::kTerminating;
        ++work.changes;
      }
      continue;
    }

    // Deleting: signal pods, then finalize once they are all gone.
    for (const std::string& uid : job.pods) {
      auto it = s.pods.find(uid);
      if (it == s.pods.end()) continue;
      PodRec& pod = it->second;
      switch (pod.pod.phase) {
        case Phase::kPending:
          if (!pod.sandbox) {
            s.Emit(now, Kind::kPod, pod.pod.meta, Phase::kPending, Phase::kDeleted, "JobDeleted");
            s.pods.erase(it);
            ++work.changes;
          } else if (pod.retry_at <= now) {
            work.cni.push_back({.pod_uid = uid, .sandbox = make_sandbox(pod), .add = false,
                                .target = Phase::kDeleted});
          }
          break;
        case Phase::kRunning: {
          const Timestamp signalled = std::max(rec.deletion_at, pod.pod.started_at.value_or(now));
          pod.terminate_at =
              signalled + std::min(job.spec.termination_seconds, pod.pod.grace_period_seconds);
          s.Emit(now, Kind::kPod, pod.pod.meta, Phase::kRunning, Phase::kTerminating, "JobDeleted");
          pod.pod.phase = Phase::kTerminating;
          ++work.changes;
          [[fallthrough]];
        }
        case Phase::kTerminating:
          if (now >= *pod.terminate_at && pod.retry_at <= now) {
            work.cni.push_back({.pod_uid = uid, .sandbox = make_sandbox(pod), .add = false,
                                .target = Phase::kDeleted});
          }
          break;
        case Phase::kSucceeded:
          s.Emit(now, Kind::kPod, pod.pod.meta, Phase::kSucceeded, Phase::kDeleted, "JobDeleted");
          s.pods.erase(it);
          ++work.changes;
          break;
        case Phase::kDeleted:
          break;
      }
    }
    if (!s.PodsGone(rec)) continue;
    if (rec.annotated && webhook_) {
      if (rec.ctl.retry_at <= now) {
        work.syncs.push_back({.kind = Kind::kJob, .key = key, .finalize = true,
                              .req = {endpoint::Parent{.kind = endpoint::ParentKind::kJob,
                                                       .ns = job.meta.ns, .name = job.meta.name,
                                                       .annotations = job.meta.annotations,
                                                       .deleting = true},
                                      s.ChildrenOf(ref)}});
      }
    } else {
      removed_jobs.push_back(key);
    }
  }
  for (const Key& key : removed_jobs) {
    JobRec& rec = s.jobs.at(key);
    s.Record(rec.job.admission.job_ref).deleted_at = now;
    s.Emit(now, Kind::kJob, rec.job.meta, rec.job.phase, Phase::kDeleted, "Removed");
    s.jobs.erase(key);
    ++work.changes;
  }

  for (auto& [key, rec] : s.claims) {
    const VniClaim& claim = rec.claim;
    const bool deleting = claim.meta.deletion_requested;
    if (!webhook_ || rec.ctl.retry_at > now) continue;
    if (!deleting && !(rec.ctl.dirty && !rec.ctl.permanent_failure)) continue;
    work.syncs.push_back({.kind = Kind::kVniClaim, .key = key, .finalize = deleting,
                          .req = {endpoint::Parent{.kind = endpoint::ParentKind::kVniClaim,
                                                   .ns = claim.meta.ns, .name = claim.meta.name,
                                                   .annotations = claim.meta.annotations,
                                                   .deleting = deleting},
                                  s.ChildrenOf(endpoint::ClaimRef(claim.meta.ns, claim.meta.name))}});
  }

  for (auto& [uid, pod] : s.pods) {
    const JobRec& owner = s.jobs.at(pod.job);
    if (owner.job.meta.deletion_requested) continue;
    if (pod.pod.phase == Phase::kPending) {
      if (now < pod.ready_at || pod.retry_at > now) continue;
      if (owner.annotated && !s.ChildOf(owner)) continue;
      Timestamp& node_free = s.node_free_at[pod.pod.node];
      if (node_free > now) continue;
      node_free = now + cost.node_start_interval;
      if (!pod.sandbox) {
        pod.sandbox = true;
        pod.pod.netns_inode = s.next_inode++;
        pod.pod.container_id = fmt::format("{:016x}{:016x}", pod.pod.netns_inode, s.next_uid);
      }
      work.cni.push_back({.pod_uid = uid, .sandbox = make_sandbox(pod), .add = true,
                          .target = Phase::kRunning});
    } else if (pod.pod.phase == Phase::kRunning && pod.run_until && now >= *pod.run_until &&
               pod.retry_at <= now) {
      work.cni.push_back({.pod_uid = uid, .sandbox = make_sandbox(pod), .add = false,
                          .target = Phase::kSucceeded});
    }
  }
  return work;
}

std::size_t Cluster::Apply(Work& work, Timestamp now) {
  State& s = *state_;
  std::size_t changes = work.changes;
  const double backoff = options_.retry_backoff;

  // Reconciles the owner's VniCrds against the desired set.
  const auto apply_children = [&](const std::string& owner,
                                  const std::vector<endpoint::VniCrd>& desired) {
    std::set<Key> keep;
    for (const endpoint::VniCrd& d : desired) {
      const Key key{d.ns, d.name};
      keep.insert(key);
      auto it = s.crds.find(key);
      if (it == s.crds.end()) {
        VniCrdObject obj{.meta = ObjectMeta{.uid = s.NewUid(), .ns = d.ns, .name = d.name,
                                            .created_at = now},
                         .crd = d, .owner = owner};
        s.Emit(now, Kind::kVniCrd, obj.meta, std::nullopt, Phase::kRunning, "Created");
        s.crds.emplace(key, std::move(obj));
        ++changes;
      } else if (it->second.owner == owner && !(it->second.crd == d)) {
        it->second.crd = d;
        ++changes;
      }
    }
    for (auto it = s.crds.begin(); it != s.crds.end();) {
      if (it->second.owner == owner && !keep.contains(it->first)) {
        s.Emit(now, Kind::kVniCrd, it->second.meta, it->second.phase, Phase::kDeleted, "Pruned");
        it = s.crds.erase(it);
        ++changes;
      } else {
        ++it;
      }
    }
  };

  for (auto& item : work.syncs) {
    ParentControl* ctl = nullptr;
    std::optional<endpoint::ParentStatus>* status = nullptr;
    std::string* last_error = nullptr;
    std::string owner;
    if (item.kind == Kind::kJob) {
      JobRec& rec = s.jobs.at(item.key);
      ctl = &rec.ctl;
      status = &rec.job.vni_status;
      last_error = &rec.job.last_error;
      owner = endpoint::JobRef(item.key.first, item.key.second);
    } else {
      ClaimRec& rec = s.claims.at(item.key);
      ctl = &rec.ctl;
      status = &rec.claim.vni_status;
      last_error = &rec.claim.last_error;
      owner = endpoint::ClaimRef(item.key.first, item.key.second);
    }
    const absl::Status call = item.finalize ? item.fin.status() : item.sync.status();
    if (!call.ok()) {
      ++s.stats.webhook_failures;
      *last_error = ErrorText(call);
      ctl->retry_at = now + backoff;
      continue;
    }
    last_error->clear();
    if (!item.finalize) {
      const endpoint::SyncResponse& resp = *item.sync;
      if (*status != resp.status) ++changes;
      *status = resp.status;
      apply_children(owner, resp.children);
      if (resp.status.phase == "Failed") {
        if (IsRetryableReason(resp.status.reason)) {
          ctl->retry_at = now + backoff;
        } else {
          ctl->permanent_failure = true;
          ctl->dirty = false;
        }
      } else {
        ctl->dirty = false;
      }
      if (item.kind == Kind::kVniClaim) {
        VniClaim& claim = s.claims.at(item.key).claim;
        if (claim.phase == Phase::kPending && resp.status.phase == "Bound") {
          s.Emit(now, Kind::kVniClaim, claim.meta, Phase::kPending, Phase::kRunning, "Bound");
          claim.phase = Phase::kRunning;
        }
      }
      continue;
    }
    const endpoint::FinalizeResponse& resp = *item.fin;
    if (!resp.finalized) {
      if (*status != resp.status) ++changes;
      *status = resp.status;
      apply_children(owner, resp.children);
      ctl->retry_at = now + backoff;
      continue;
    }
    apply_children(owner, {});
    if (item.kind == Kind::kJob) {
      JobRec& rec = s.jobs.at(item.key);
      s.Record(rec.job.admission.job_ref).deleted_at = now;
      s.Emit(now, Kind::kJob, rec.job.meta, rec.job.phase, Phase::kDeleted, "Finalized");
      s.jobs.erase(item.key);
    } else {
      ClaimRec& rec = s.claims.at(item.key);
      s.Emit(now, Kind::kVniClaim, rec.claim.meta, rec.claim.phase, Phase::kDeleted, "Finalized");
      s.claims.erase(item.key);
    }
    ++changes;
  }

  for (auto& item : work.cni) {
    auto it = s.pods.find(item.pod_uid);
    if (it == s.pods.end()) continue;
    PodRec& pod = it->second;
    if (!item.result.ok()) {
      ++s.stats.cni_failures;
      pod.pod.last_error = ErrorText(item.result);
      pod.retry_at = now + backoff;
      pod.permanent_cni_error = Is(item.result, ErrorKind::kGracePeriodTooLong);
      continue;
    }
    pod.pod.last_error.clear();
    pod.permanent_cni_error = false;
    ++changes;
    JobRec& owner = s.jobs.at(pod.job);
    Job& job = owner.job;
    if (item.add) {
      s.Emit(now, Kind::kPod, pod.pod.meta, pod.pod.phase, Phase::kRunning, "Started");
      pod.pod.phase = Phase::kRunning;
      pod.pod.started_at = now;
      if (job.spec.run_seconds) pod.run_until = now + *job.spec.run_seconds;
      const bool all_running = std::all_of(job.pods.begin(), job.pods.end(), [&](const auto& uid) {
        auto p = s.pods.find(uid);
        return p != s.pods.end() && p->second.pod.phase != Phase::kPending;
      });
      if (all_running && job.phase == Phase::kPending) {
        s.Emit(now, Kind::kJob, job.meta, Phase::kPending, Phase::kRunning, "Started");
        job.phase = Phase::kRunning;
        job.admission.started_at = now;
        s.Record(job.admission.job_ref).started_at = now;
      }
      continue;
    }
    pod.sandbox = false;
    if (item.target == Phase::kDeleted) {
      s.Emit(now, Kind::kPod, pod.pod.meta, pod.pod.phase, Phase::kDeleted, "Stopped");
      s.pods.erase(it);
      continue;
    }
    s.Emit(now, Kind::kPod, pod.pod.meta, pod.pod.phase, Phase::kSucceeded, "Completed");
    pod.pod.phase = Phase::kSucceeded;
    const bool all_done = std::all_of(job.pods.begin(), job.pods.end(), [&](const auto& uid) {
      auto p = s.pods.find(uid);
      return p != s.pods.end() && p->second.pod.phase == Phase::kSucceeded;
    });
    if (all_done && job.phase == Phase::kRunning) {
      s.Emit(now, Kind::kJob, job.meta, Phase::kRunning, Phase::kSucceeded, "Completed");
      job.phase = Phase::kSucceeded;
      job.admission.completed_at = now;
      s.Record(job.admission.job_ref).completed_at = now;
      ++s.jobs_succeeded;
    }
  }
  return changes;
}

std::size_t Cluster::ReconcileStep(Timestamp now) {
  std::lock_guard step(step_mu_);
  Work work;
  {
    std::lock_guard lock(mu_);
    ++state_->stats.steps;
    work = Collect(now);
  }
  for (auto& item : work.syncs) {
    if (item.finalize) {
      item.fin = webhook_->Finalize(item.req);
    } else {
      item.sync = webhook_->Sync(item.req);
    }
  }
  for (auto& item : work.cni) item.result = item.add ? cni_.Add(item.sandbox) : cni_.Del(item.sandbox);

  std::lock_guard lock(mu_);
  ClusterStats& stats = state_->stats;
  for (const auto& item : work.syncs) ++(item.finalize ? stats.finalize_calls : stats.sync_calls);
  for (const auto& item : work.cni) ++(item.add ? stats.cni_add_calls : stats.cni_del_calls);
  return Apply(work, now);
}

bool Cluster::HasPendingWork() const {
  std::lock_guard lock(mu_);
  const State& s = *state_;
  for (const auto& [_, rec] : s.jobs) {
    if (!rec.pods_created || rec.job.meta.deletion_requested) return true;
    if (rec.annotated && webhook_ && rec.ctl.dirty && !rec.ctl.permanent_failure) return true;
    if (rec.job.phase == Phase::kSucceeded && rec.job.spec.ttl_seconds_after_finished) return true;
  }
  for (const auto& [_, rec] : s.claims) {
    if (!webhook_) continue;
    if (rec.claim.meta.deletion_requested) return true;
    if (rec.ctl.dirty && !rec.ctl.permanent_failure) return true;
  }
  for (const auto& [_, pod] : s.pods) {
    const JobRec& owner = s.jobs.at(pod.job);
    switch (pod.pod.phase) {
      case Phase::kPending:
        if (pod.permanent_cni_error || owner.ctl.permanent_failure) break;
        if (owner.annotated && !webhook_) break;
        return true;
      case Phase::kRunning:
        if (pod.run_until) return true;
        break;
      case Phase::kTerminating:
        return true;
      default:
        break;
    }
  }
  return false;
}

std::optional<Timestamp> Cluster::NextWakeup() const {
  const Timestamp now = clock_.Now();
  std::lock_guard lock(mu_);
  const State& s = *state_;
  std::optional<Timestamp> best;
  const auto consider = [&](Timestamp t) {
    if (t > now && (!best || t < *best)) best = t;
  };
  for (const auto& [_, rec] : s.jobs) {
    if (rec.ctl.dirty || rec.job.meta.deletion_requested) consider(rec.ctl.retry_at);
    if (rec.job.phase == Phase::kSucceeded && rec.job.spec.ttl_seconds_after_finished) {
      consider(*rec.job.admission.completed_at + *rec.job.spec.ttl_seconds_after_finished);
    }
  }
  for (const auto& [_, rec] : s.claims) consider(rec.ctl.retry_at);
  for (const auto& [_, pod] : s.pods) {
    switch (pod.pod.phase) {
      case Phase::kPending:
        consider(std::max({pod.ready_at, pod.retry_at, s.node_free_at.at(pod.pod.node)}));
        break;
      case Phase::kRunning:
        if (pod.run_until) consider(std::max(*pod.run_until, pod.retry_at));
        break;
      case Phase::kTerminating:
        consider(std::max(*pod.terminate_at, pod.retry_at));
        break;
      default:
        break;
    }
  }
  return best;
}

absl::Status Cluster::RunUntil(VirtualClock& clock, Timestamp until, std::size_t max_steps,
                               double idle_tick) {
  for (std::size_t i = 0; i < max_steps; ++i) {
    if (clock.Now() >= until) return absl::OkStatus();
    if (ReconcileStep(clock.Now()) > 0) continue;
    const auto next = NextWakeup();
    clock.AdvanceTo(std::min(next ? *next : clock.Now() + idle_tick, until));
  }
  return MakeError(ErrorKind::kNonQuiescent, StrCat("clock did not reach ", until, " within ",
                                                    max_steps, " steps"));
}

absl::StatusOr<ClusterSummary> Cluster::RunUntilQuiescent(VirtualClock& clock,
                                                          std::size_t max_steps,
                                                          double idle_tick) {
  for (std::size_t i = 1; i <= max_steps; ++i) {
    const std::size_t changes = ReconcileStep(clock.Now());
    if (!HasPendingWork()) {
      ClusterSummary summary = Summary();
      summary.steps = i;
      return summary;
    }
    if (changes > 0) continue;
    const auto next = NextWakeup();
    clock.AdvanceTo(next ? *next : clock.Now() + idle_tick);
  }
  return MakeError(ErrorKind::kNonQuiescent, StrCat("work remains after ", max_steps, " steps"));
}

void Cluster::WaitForWork(Timestamp deadline) const {
  const double seconds = deadline - clock_.Now();
  if (seconds <= 0) return;
  std::unique_lock lock(mu_);
  const std::uint64_t gen = state_->generation;
  work_cv_.wait_for(lock, std::chrono::duration<double>(seconds),
                    [&] { return state_->generation != gen; });
}

std::optional<Job> Cluster::GetJob(const std::string& ns, const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = state_->jobs.find({ns, name});
  if (it == state_->jobs.end()) return std::nullopt;
  return it->second.job;
}

std::optional<VniClaim> Cluster::GetClaim(const std::string& ns, const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = state_->claims.find({ns, name});
  if (it == state_->claims.end()) return std::nullopt;
  return it->second.claim;
}

std::optional<Pod> Cluster::GetPod(const std::string& uid) const {
  std::lock_guard lock(mu_);
  auto it = state_->pods.find(uid);
  if (it == state_->pods.end()) return std::nullopt;
  return it->second.pod;
}

std::vector<Pod> Cluster::ListPods() const {
  std::lock_guard lock(mu_);
  std::vector<Pod> out;
  for (const auto& [_, rec] : state_->pods) out.push_back(rec.pod);
  return out;
}

std::vector<Job> Cluster::ListJobs() const {
  std::lock_guard lock(mu_);
  std::vector<Job> out;
  for (const auto& [_, rec] : state_->jobs) out.push_back(rec.job);
  return out;
}

std::vector<VniCrdObject> Cluster::ListVniCrds(const std::string& owner) const {
  std::lock_guard lock(mu_);
  std::vector<VniCrdObject> out;
  for (const auto& [_, obj] : state_->crds) {
    if (owner.empty() || obj.owner == owner) out.push_back(obj);
  }
  return out;
}

std::optional<cni::PodInfo> Cluster::PodInfoFor(const std::string& uid) const {
  std::lock_guard lock(mu_);
  const State& s = *state_;
  auto it = s.pods.find(uid);
  if (it == s.pods.end()) return std::nullopt;
  const PodRec& pod = it->second;
  const JobRec& owner = s.jobs.at(pod.job);
  cni::PodInfo info{.uid = uid, .ns = pod.pod.meta.ns, .name = pod.pod.meta.name,
                    .node = pod.pod.node, .grace_period_seconds = pod.pod.grace_period_seconds,
                    .job = owner.job.meta.name, .annotations = owner.job.meta.annotations};
  if (const VniCrdObject* child = s.ChildOf(owner)) info.vni = child->crd.vni;
  return info;
}

std::vector<AdmissionRecord> Cluster::AdmissionRecords() const {
  std::lock_guard lock(mu_);
  return state_->records;
}

std::size_t Cluster::ControllerQueueLength() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [_, rec] : state_->jobs) {
    n += rec.annotated && (rec.ctl.dirty || rec.job.meta.deletion_requested);
  }
  for (const auto& [_, rec] : state_->claims) {
    n += rec.ctl.dirty || rec.claim.meta.deletion_requested;
  }
  return n;
}

ClusterStats Cluster::stats() const {
  std::lock_guard lock(mu_);
  return state_->stats;
}

ClusterSummary Cluster::Summary() const {
  const Timestamp now = clock_.Now();
  std::lock_guard lock(mu_);
  const State& s = *state_;
  ClusterSummary out;
  out.steps = s.stats.steps;
  out.now = now;
  out.jobs_submitted = s.records.size();
  out.jobs_succeeded = s.jobs_succeeded;
  out.jobs_live = s.jobs.size();
  out.claims_live = s.claims.size();
  out.vnicrds = s.crds.size();
  for (const auto& [_, pod] : s.pods) ++out.pods[pod.pod.phase];
  return out;
}

void Cluster::SetEventSink(EventSink sink) {
  std::lock_guard lock(mu_);
  state_->sink = std::move(sink);
}

}  // namespace vnimesh::sim
