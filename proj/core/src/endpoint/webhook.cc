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

#include "vnimesh/endpoint/webhook.h"

#include <utility>

#include "../common/background_server.h"
#include "../common/http_errors.h"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/http.h"
#include "vnimesh/endpoint/json.h"

namespace vnimesh::endpoint {
namespace {

using nlohmann::json;

// Encodes and decodes once so the in-process path exercises the wire format.
template <typename Response, typename Decode>
absl::StatusOr<Response> RoundTrip(const absl::StatusOr<Response>& resp, Decode decode) {
  if (!resp.ok()) return resp.status();
  return decode(json::parse(ToJson(*resp).dump()));
}

absl::StatusOr<SyncRequest> ReencodeRequest(const SyncRequest& req) {
  return SyncRequestFromJson(json::parse(ToJson(req).dump()));
}

}  // namespace

absl::StatusOr<SyncResponse> InProcessWebhook::Sync(const SyncRequest& req) {
  ++sync_calls_;
  if (!available_) return MakeError(ErrorKind::kWebhookUnavailable, "VNI endpoint is down");
  auto wire = ReencodeRequest(req);
  if (!wire.ok()) return wire.status();
  return RoundTrip(endpoint_.HandleSync(*wire, clock_.Now()),
                   [](const json& j) { return SyncResponseFromJson(j); });
}

absl::StatusOr<FinalizeResponse> InProcessWebhook::Finalize(const SyncRequest& req) {
  ++finalize_calls_;
  if (!available_) return MakeError(ErrorKind::kWebhookUnavailable, "VNI endpoint is down");
  auto wire = ReencodeRequest(req);
  if (!wire.ok()) return wire.status();
  return RoundTrip(endpoint_.HandleFinalize(*wire, clock_.Now()),
                   [](const json& j) { return FinalizeResponseFromJson(j); });
}

struct HttpWebhook::Impl {
  httplib::Client client;
  Impl(const std::string& host, int port) : client(host, port) {}

  absl::StatusOr<json> Post(const char* path, const SyncRequest& req) {
    auto res = client.Post(path, ToJson(req).dump(), "application/json");
    if (!res) return internal::TransportError(res, ErrorKind::kWebhookUnavailable);
    if (res->status != 200) return internal::StatusFromReply(res->status, res->body);
    auto body = json::parse(res->body, nullptr, false);
    if (body.is_discarded()) return absl::InternalError("webhook replied with invalid JSON");
    return body;
  }
};

HttpWebhook::HttpWebhook(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
HttpWebhook::~HttpWebhook() = default;

absl::StatusOr<std::unique_ptr<HttpWebhook>> HttpWebhook::Connect(
    const std::string& url, std::chrono::milliseconds timeout) {
  auto hp = ParseHostPort(url);
  if (!hp.ok()) return hp.status();
  auto impl = std::make_unique<Impl>(hp->host, hp->port);
  impl->client.set_connection_timeout(timeout);
  impl->client.set_read_timeout(timeout);
  impl->client.set_keep_alive(true);
  return std::unique_ptr<HttpWebhook>(new HttpWebhook(std::move(impl)));
}

absl::StatusOr<SyncResponse> HttpWebhook::Sync(const SyncRequest& req) {
  auto body = impl_->Post("/sync", req);
  if (!body.ok()) return body.status();
  return SyncResponseFromJson(*body);
}

absl::StatusOr<FinalizeResponse> HttpWebhook::Finalize(const SyncRequest& req) {
  auto body = impl_->Post("/finalize", req);
  if (!body.ok()) return body.status();
  return FinalizeResponseFromJson(*body);
}

struct WebhookServer::Impl {
  VniEndpoint& endpoint;
  const Clock& clock;
  internal::BackgroundServer bg;
  Impl(VniEndpoint& e, const Clock& c) : endpoint(e), clock(c) {}
};

WebhookServer::WebhookServer(VniEndpoint& endpoint, const Clock& clock)
    : impl_(std::make_unique<Impl>(endpoint, clock)) {
  auto& srv = impl_->bg.server();
  Impl* impl = impl_.get();

  srv.Post("/sync", [impl](const httplib::Request& req, httplib::Response& res) {
    auto parsed = ParseSyncRequest(req.body);
    if (!parsed.ok()) return internal::ReplyError(res, parsed.status());
    auto resp = impl->endpoint.HandleSync(*parsed, impl->clock.Now());
    if (!resp.ok()) return internal::ReplyError(res, resp.status());
    internal::ReplyJson(res, ToJson(*resp));
  });

  srv.Post("/finalize", [impl](const httplib::Request& req, httplib::Response& res) {
    auto parsed = ParseSyncRequest(req.body);
    if (!parsed.ok()) return internal::ReplyError(res, parsed.status());
    auto resp = impl->endpoint.HandleFinalize(*parsed, impl->clock.Now());
    if (!resp.ok()) return internal::ReplyError(res, resp.status());
    internal::ReplyJson(res, ToJson(*resp));
  });

  srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
}

WebhookServer::~WebhookServer() = default;

absl::StatusOr<int> WebhookServer::Start(const std::string& host, int port) {
  return impl_->bg.Start(host, port);
}
void WebhookServer::Stop() { impl_->bg.Stop(); }
void WebhookServer::Wait() { impl_->bg.Wait(); }
int WebhookServer::port() const { return impl_->bg.port(); }

}  // namespace vnimesh::endpoint
