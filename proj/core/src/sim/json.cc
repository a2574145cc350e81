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

#include "vnimesh/sim/json.h"

#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"
#include "vnimesh/endpoint/json.h"

namespace vnimesh::sim {
namespace {

using nlohmann::json;

constexpr std::string_view kBatchApi = "batch/v1";
constexpr std::string_view kCoreApi = "v1";
constexpr std::string_view kVniApi = "vnimesh.dev/v1";

json Meta(const ObjectMeta& meta) {
  json j = {{"uid", meta.uid},
            {"namespace", meta.ns},
            {"name", meta.name},
            {"annotations", meta.annotations},
            {"creationTimestamp", meta.created_at}};
  if (meta.deletion_requested) j["deletionRequested"] = true;
  return j;
}

json Opt(const std::optional<Timestamp>& t) { return t ? json(*t) : json(nullptr); }

json SpecJson(const JobSpec& spec) {
  json j = {{"pods", spec.pods},
            {"command", spec.command},
            {"gracePeriodSeconds", spec.grace_period_seconds},
            {"runSeconds", Opt(spec.run_seconds)},
            {"terminationSeconds", spec.termination_seconds},
            {"ttlSecondsAfterFinished", Opt(spec.ttl_seconds_after_finished)},
            {"topologySpread", spec.topology_spread}};
  return j;
}

std::optional<Timestamp> OptFrom(const json& j, const char* key, std::optional<Timestamp> dflt) {
  if (!j.contains(key)) return dflt;
  if (j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

json ToJson(const ResourceObject& obj) {
  json j = {{"apiVersion", obj.kind == Kind::kJob ? kBatchApi : kVniApi},
            {"kind", KindName(obj.kind)},
            {"metadata", {{"namespace", obj.meta.ns}, {"name", obj.meta.name},
                          {"annotations", obj.meta.annotations}}}};
  if (obj.kind == Kind::kJob) j["spec"] = SpecJson(obj.job);
  return j;
}

absl::StatusOr<ResourceObject> ResourceObjectFromJson(const json& j) {
  try {
    ResourceObject obj;
    auto kind = ParseKind(j.at("kind").get<std::string>());
    if (!kind || (*kind != Kind::kJob && *kind != Kind::kVniClaim)) {
      return MakeError(ErrorKind::kMalformedRequest,
                       StrCat("cannot submit kind ", j.at("kind").get<std::string>()));
    }
    obj.kind = *kind;
    const json& meta = j.at("metadata");
    obj.meta.ns = meta.value("namespace", "default");
    obj.meta.name = meta.at("name").get<std::string>();
    obj.meta.annotations =
        meta.value("annotations", json::object()).get<std::map<std::string, std::string>>();
    if (obj.kind == Kind::kJob && j.contains("spec")) {
      const json& spec = j["spec"];
      JobSpec& s = obj.job;
      s.pods = spec.value("pods", s.pods);
      s.command = spec.value("command", s.command);
      s.grace_period_seconds = spec.value("gracePeriodSeconds", s.grace_period_seconds);
      s.run_seconds = OptFrom(spec, "runSeconds", s.run_seconds);
      s.termination_seconds = spec.value("terminationSeconds", s.termination_seconds);
      s.ttl_seconds_after_finished =
          OptFrom(spec, "ttlSecondsAfterFinished", s.ttl_seconds_after_finished);
      s.topology_spread = spec.value("topologySpread", s.topology_spread);
    }
    return obj;
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kMalformedRequest, StrCat("resource: ", e.what()));
  }
}

json ToJson(const Job& job) {
  json status = {{"phase", PhaseName(job.phase)}, {"pods", job.pods},
                 {"admission", ToJson(job.admission)}};
  if (job.vni_status) status["vni"] = endpoint::ToJson(*job.vni_status);
  if (!job.last_error.empty()) status["lastError"] = job.last_error;
  return {{"apiVersion", kBatchApi}, {"kind", "Job"}, {"metadata", Meta(job.meta)},
          {"spec", SpecJson(job.spec)}, {"status", status}};
}

json ToJson(const VniClaim& claim) {
  json status = {{"phase", PhaseName(claim.phase)}};
  if (claim.vni_status) status["vni"] = endpoint::ToJson(*claim.vni_status);
  if (!claim.last_error.empty()) status["lastError"] = claim.last_error;
  return {{"apiVersion", kVniApi}, {"kind", "VniClaim"}, {"metadata", Meta(claim.meta)},
          {"status", status}};
}

json ToJson(const Pod& pod) {
  json status = {{"phase", PhaseName(pod.phase)}, {"startedAt", Opt(pod.started_at)}};
  if (!pod.last_error.empty()) status["lastError"] = pod.last_error;
  return {{"apiVersion", kCoreApi},
          {"kind", "Pod"},
          {"metadata", Meta(pod.meta)},
          {"spec", {{"job", pod.job}, {"node", pod.node}, {"netnsInode", pod.netns_inode},
                    {"containerId", pod.container_id},
                    {"gracePeriodSeconds", pod.grace_period_seconds}}},
          {"status", status}};
}

json ToJson(const VniCrdObject& crd) {
  json j = endpoint::ToJson(crd.crd);
  j["metadata"]["uid"] = crd.meta.uid;
  j["metadata"]["owner"] = crd.owner;
  j["metadata"]["creationTimestamp"] = crd.meta.created_at;
  return j;
}

json ToJson(const AdmissionRecord& rec) {
  return {{"job", rec.job_ref}, {"submittedAt", rec.submitted_at},
          {"startedAt", Opt(rec.started_at)}, {"completedAt", Opt(rec.completed_at)},
          {"deletedAt", Opt(rec.deleted_at)}};
}

json ToJson(const ClusterSummary& summary) {
  json pods = json::object();
  for (const auto& [phase, n] : summary.pods) pods[std::string(PhaseName(phase))] = n;
  return {{"steps", summary.steps}, {"now", summary.now},
          {"jobsSubmitted", summary.jobs_submitted}, {"jobsSucceeded", summary.jobs_succeeded},
          {"jobsLive", summary.jobs_live}, {"claimsLive", summary.claims_live},
          {"vniCrds", summary.vnicrds}, {"pods", pods}};
}

json ToJson(const Event& e) {
  return {{"t", e.t},
          {"kind", KindName(e.kind)},
          {"namespace", e.ns},
          {"name", e.name},
          {"uid", e.uid},
          {"from", e.from ? json(PhaseName(*e.from)) : json(nullptr)},
          {"to", PhaseName(e.to)},
          {"reason", e.reason}};
}

absl::StatusOr<Event> EventFromJson(const json& j) {
  const auto phase = [](const json& v) -> std::optional<Phase> {
    for (Phase p : {Phase::kPending, Phase::kRunning, Phase::kSucceeded, Phase::kTerminating,
                    Phase::kDeleted}) {
      if (PhaseName(p) == v.get<std::string>()) return p;
    }
    return std::nullopt;
  };
  try {
    Event e;
    e.t = j.at("t").get<double>();
    auto kind = ParseKind(j.at("kind").get<std::string>());
    auto to = phase(j.at("to"));
    if (!kind || !to) return MakeError(ErrorKind::kMalformedRequest, "bad event kind or phase");
    e.kind = *kind;
    e.to = *to;
    e.ns = j.at("namespace").get<std::string>();
    e.name = j.at("name").get<std::string>();
    e.uid = j.at("uid").get<std::string>();
    if (!j.at("from").is_null()) {
      e.from = phase(j["from"]);
      if (!e.from) return MakeError(ErrorKind::kMalformedRequest, "bad event phase");
    }
    e.reason = j.value("reason", "");
    return e;
  } catch (const json::exception& ex) {
    return MakeError(ErrorKind::kMalformedRequest, StrCat("event: ", ex.what()));
  }
}

void JsonLinesWriter::operator()(const Event& event) {
  std::lock_guard lock(mu_);
  out_ << ToJson(event).dump() << '\n';
}

}  // namespace vnimesh::sim
