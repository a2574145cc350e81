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

#include "vnimesh/cni/pod_info.h"

#include <utility>

#include "../common/http_errors.h"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/http.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::cni {

using nlohmann::json;

json ToJson(const PodInfo& pod) {
  json j = {{"uid", pod.uid},
            {"namespace", pod.ns},
            {"name", pod.name},
            {"node", pod.node},
            {"gracePeriodSeconds", pod.grace_period_seconds},
            {"job", {{"name", pod.job}, {"annotations", pod.annotations}}},
            {"vni", nullptr}};
  if (pod.vni) j["vni"] = *pod.vni;
  return j;
}

absl::StatusOr<PodInfo> PodInfoFromJson(const json& j) {
  try {
    PodInfo pod;
    pod.uid = j.at("uid").get<std::string>();
    pod.ns = j.at("namespace").get<std::string>();
    pod.name = j.at("name").get<std::string>();
    pod.node = j.at("node").get<std::string>();
    pod.grace_period_seconds = j.at("gracePeriodSeconds").get<double>();
    const json& job = j.at("job");
    pod.job = job.at("name").get<std::string>();
    pod.annotations = job.value("annotations", json::object())
                          .get<std::map<std::string, std::string>>();
    if (j.contains("vni") && !j["vni"].is_null()) pod.vni = j["vni"].get<Vni>();
    return pod;
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kMalformedRequest, StrCat("pod info: ", e.what()));
  }
}

struct HttpManagementClient::Impl {
  httplib::Client client;
  Impl(const std::string& host, int port) : client(host, port) {}
};

HttpManagementClient::HttpManagementClient(std::unique_ptr<Impl> impl)
    : impl_(std::move(impl)) {}
HttpManagementClient::~HttpManagementClient() = default;

absl::StatusOr<std::unique_ptr<HttpManagementClient>> HttpManagementClient::Connect(
    const std::string& url, std::chrono::milliseconds timeout) {
  auto hp = ParseHostPort(url);
  if (!hp.ok()) return hp.status();
  auto impl = std::make_unique<Impl>(hp->host, hp->port);
  impl->client.set_connection_timeout(timeout);
  impl->client.set_read_timeout(timeout);
  return std::unique_ptr<HttpManagementClient>(new HttpManagementClient(std::move(impl)));
}

absl::StatusOr<PodInfo> HttpManagementClient::GetPod(const std::string& uid) {
  auto res = impl_->client.Get(StrCat("/api/pods/", uid));
  if (!res) return internal::TransportError(res, ErrorKind::kManagementApiUnreachable);
  if (res->status == 404) return MakeError(ErrorKind::kNotFound, StrCat("pod ", uid));
  if (res->status != 200) return internal::StatusFromReply(res->status, res->body);
  auto body = json::parse(res->body, nullptr, false);
  if (body.is_discarded()) return absl::InternalError("malformed pod reply");
  return PodInfoFromJson(body);
}

}  // namespace vnimesh::cni
