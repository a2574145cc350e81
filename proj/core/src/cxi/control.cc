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

#include "vnimesh/cxi/control.h"

#include <charconv>
#include <utility>

#include "../common/background_server.h"
#include "../common/http_errors.h"
#include "vnimesh/common/strings.h"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/http.h"

namespace vnimesh::cxi {

using nlohmann::json;

absl::StatusOr<ServiceId> LocalCxiControl::CreateService(const NodeId& node,
                                                         const CreateServiceRequest& req) {
  return fabric_.CreateService(node, req.member, req.vnis, req.max_endpoints);
}

absl::Status LocalCxiControl::DeleteService(const NodeId& node, ServiceId id) {
  return fabric_.DeleteService(node, id);
}

absl::StatusOr<std::vector<CxiService>> LocalCxiControl::ListServices(const NodeId& node) {
  return fabric_.ListServices(node);
}

struct HttpCxiControl::Impl {
  httplib::Client client;
  Impl(const std::string& host, int port) : client(host, port) {}
};

HttpCxiControl::HttpCxiControl(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
HttpCxiControl::~HttpCxiControl() = default;

absl::StatusOr<std::unique_ptr<HttpCxiControl>> HttpCxiControl::Connect(
    const std::string& url, std::chrono::milliseconds timeout) {
  auto hp = ParseHostPort(url);
  if (!hp.ok()) return hp.status();
  auto impl = std::make_unique<Impl>(hp->host, hp->port);
  impl->client.set_connection_timeout(timeout);
  impl->client.set_read_timeout(timeout);
  impl->client.set_write_timeout(timeout);
  return std::unique_ptr<HttpCxiControl>(new HttpCxiControl(std::move(impl)));
}

absl::StatusOr<ServiceId> HttpCxiControl::CreateService(const NodeId& node,
                                                        const CreateServiceRequest& req) {
  auto res = impl_->client.Post(StrCat("/nodes/", node, "/services"), ToJson(req).dump(),
                                "application/json");
  if (!res) return internal::TransportError(res, ErrorKind::kCxiUnreachable);
  if (res->status != 201 && res->status != 200) {
    return internal::StatusFromReply(res->status, res->body);
  }
  auto body = json::parse(res->body, nullptr, false);
  if (!body.is_object() || !body.contains("id") || !body["id"].is_number_unsigned()) {
    return absl::InternalError("malformed create-service reply");
  }
  return body["id"].get<ServiceId>();
}

absl::Status HttpCxiControl::DeleteService(const NodeId& node, ServiceId id) {
  auto res = impl_->client.Delete(StrCat("/nodes/", node, "/services/", id));
  if (!res) return internal::TransportError(res, ErrorKind::kCxiUnreachable);
  if (res->status == 204 || res->status == 200) return absl::OkStatus();
  return internal::StatusFromReply(res->status, res->body);
}

absl::StatusOr<std::vector<CxiService>> HttpCxiControl::ListServices(const NodeId& node) {
  auto res = impl_->client.Get(StrCat("/nodes/", node, "/services"));
  if (!res) return internal::TransportError(res, ErrorKind::kCxiUnreachable);
  if (res->status != 200) return internal::StatusFromReply(res->status, res->body);
  auto body = json::parse(res->body, nullptr, false);
  if (!body.is_array()) return absl::InternalError("malformed list-services reply");
  std::vector<CxiService> out;
  for (const auto& entry : body) {
    auto svc = ServiceFromJson(entry);
    if (!svc.ok()) return svc.status();
    out.push_back(*std::move(svc));
  }
  return out;
}

struct ManagementServer::Impl {
  Fabric& fabric;
  internal::BackgroundServer bg;
  explicit Impl(Fabric& f) : fabric(f) {}
};

ManagementServer::ManagementServer(Fabric& fabric) : impl_(std::make_unique<Impl>(fabric)) {
  auto& srv = impl_->bg.server();
  Fabric& fab = impl_->fabric;

  srv.Post(R"(/nodes/([^/]+)/services)", [&fab](const httplib::Request& req,
                                                httplib::Response& res) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
      internal::ReplyError(res, absl::InvalidArgumentError("malformed JSON"));
      return;
    }
    auto parsed = CreateServiceRequestFromJson(body);
    if (!parsed.ok()) {
      internal::ReplyError(res, parsed.status());
      return;
    }
    auto id = fab.CreateService(req.matches[1], parsed->member, parsed->vnis,
                                parsed->max_endpoints);
    if (!id.ok()) {
      internal::ReplyError(res, id.status());
      return;
    }
    internal::ReplyJson(res, json{{"id", *id}}, 201);
  });

  srv.Delete(R"(/nodes/([^/]+)/services/(\d+))", [&fab](const httplib::Request& req,
                                                       httplib::Response& res) {
    ServiceId id = 0;
    const std::string raw = req.matches[2];
    std::from_chars(raw.data(), raw.data() + raw.size(), id);
    if (auto status = fab.DeleteService(req.matches[1], id); !status.ok()) {
      internal::ReplyError(res, status);
      return;
    }
    res.status = 204;
  });

  srv.Get(R"(/nodes/([^/]+)/services)", [&fab](const httplib::Request& req,
                                               httplib::Response& res) {
    auto services = fab.ListServices(req.matches[1]);
    if (!services.ok()) {
      internal::ReplyError(res, services.status());
      return;
    }
    json out = json::array();
    for (const auto& svc : *services) out.push_back(ToJson(svc));
    internal::ReplyJson(res, out);
  });

  srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
}

ManagementServer::~ManagementServer() = default;

absl::StatusOr<int> ManagementServer::Start(const std::string& host, int port) {
  return impl_->bg.Start(host, port);
}
void ManagementServer::Stop() { impl_->bg.Stop(); }
void ManagementServer::Wait() { impl_->bg.Wait(); }
int ManagementServer::port() const { return impl_->bg.port(); }

}  // namespace vnimesh::cxi
