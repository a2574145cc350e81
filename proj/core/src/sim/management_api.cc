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

#include "vnimesh/sim/management_api.h"

#include "../common/background_server.h"
#include "../common/http_errors.h"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"
#include "vnimesh/sim/json.h"

namespace vnimesh::sim {

using nlohmann::json;

absl::StatusOr<cni::PodInfo> ClusterManagementClient::GetPod(const std::string& uid) {
  auto info = cluster_.PodInfoFor(uid);
  if (!info) return MakeError(ErrorKind::kNotFound, StrCat("pod ", uid));
  return *std::move(info);
}

struct ManagementApiServer::Impl {
  const Cluster& cluster;
  internal::BackgroundServer bg;

  explicit Impl(const Cluster& c) : cluster(c) {
    httplib::Server& srv = bg.server();
    const auto not_found = [](httplib::Response& res, std::string what) {
      internal::ReplyError(res, MakeError(ErrorKind::kNotFound, what));
    };
    srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    srv.Get(R"(/api/pods/([^/]+))", [this, not_found](const httplib::Request& req,
                                                     httplib::Response& res) {
      const std::string uid = req.matches[1];
      auto info = cluster.PodInfoFor(uid);
      auto pod = cluster.GetPod(uid);
      if (!info || !pod) return not_found(res, StrCat("pod ", uid));
      json body = cni::ToJson(*info);
      const json full = ToJson(*pod);
      body["phase"] = full["status"]["phase"];
      body["netnsInode"] = pod->netns_inode;
      body["containerId"] = pod->container_id;
      internal::ReplyJson(res, body);
    });
    srv.Get(R"(/api/jobs/([^/]+)/([^/]+))", [this, not_found](const httplib::Request& req,
                                                             httplib::Response& res) {
      auto job = cluster.GetJob(req.matches[1], req.matches[2]);
      if (!job) return not_found(res, StrCat("job ", req.matches[1].str(), "/", req.matches[2].str()));
      json body = ToJson(*job);
      json crds = json::array();
      for (const auto& crd : cluster.ListVniCrds(endpoint::JobRef(job->meta.ns, job->meta.name))) {
        crds.push_back(ToJson(crd));
      }
      body["status"]["vniCrds"] = crds;
      internal::ReplyJson(res, body);
    });
    srv.Get(R"(/api/claims/([^/]+)/([^/]+))", [this, not_found](const httplib::Request& req,
                                                               httplib::Response& res) {
      auto claim = cluster.GetClaim(req.matches[1], req.matches[2]);
      if (!claim) {
        return not_found(res, StrCat("claim ", req.matches[1].str(), "/", req.matches[2].str()));
      }
      internal::ReplyJson(res, ToJson(*claim));
    });
    srv.Get("/api/vnicrds", [this](const httplib::Request& req, httplib::Response& res) {
      json out = json::array();
      for (const auto& crd : cluster.ListVniCrds(req.get_param_value("owner"))) {
        out.push_back(ToJson(crd));
      }
      internal::ReplyJson(res, out);
    });
    srv.Get("/api/admission", [this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& rec : cluster.AdmissionRecords()) out.push_back(ToJson(rec));
      internal::ReplyJson(res, out);
    });
  }
};

ManagementApiServer::ManagementApiServer(const Cluster& cluster)
    : impl_(std::make_unique<Impl>(cluster)) {}
ManagementApiServer::~ManagementApiServer() = default;

absl::StatusOr<int> ManagementApiServer::Start(const std::string& host, int port) {
  return impl_->bg.Start(host, port);
}
void ManagementApiServer::Stop() { impl_->bg.Stop(); }
void ManagementApiServer::Wait() { impl_->bg.Wait(); }
int ManagementApiServer::port() const { return impl_->bg.port(); }

}  // namespace vnimesh::sim
