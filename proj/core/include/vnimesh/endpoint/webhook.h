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

#ifndef VNIMESH_ENDPOINT_WEBHOOK_H_
#define VNIMESH_ENDPOINT_WEBHOOK_H_

#include <atomic>
#include <chrono>
#include <memory>
#include <string>

#include "absl/status/statusor.h"
#include "vnimesh/common/clock.h"
#include "vnimesh/endpoint/types.h"
#include "vnimesh/endpoint/vni_endpoint.h"

namespace vnimesh::endpoint {

// Controller-side view of the VNI Endpoint. Transport failures surface as
// WebhookUnavailable.
class Webhook {
 public:
  virtual ~Webhook() = default;
  virtual absl::StatusOr<SyncResponse> Sync(const SyncRequest& req) = 0;
  virtual absl::StatusOr<FinalizeResponse> Finalize(const SyncRequest& req) = 0;
};

// Calls a VniEndpoint in-process, encoding every request and response through
// the JSON wire format. Can be switched off to model an endpoint outage.
class InProcessWebhook final : public Webhook {
 public:
  InProcessWebhook(VniEndpoint& endpoint, const Clock& clock)
      : endpoint_(endpoint), clock_(clock) {}

  absl::StatusOr<SyncResponse> Sync(const SyncRequest& req) override;
  absl::StatusOr<FinalizeResponse> Finalize(const SyncRequest& req) override;

  void set_available(bool up) { available_ = up; }
  std::size_t sync_calls() const { return sync_calls_; }
  std::size_t finalize_calls() const { return finalize_calls_; }

 private:
  VniEndpoint& endpoint_;
  const Clock& clock_;
  std::atomic<bool> available_{true};
  std::atomic<std::size_t> sync_calls_{0};
  std::atomic<std::size_t> finalize_calls_{0};
};

class HttpWebhook final : public Webhook {
 public:
  static absl::StatusOr<std::unique_ptr<HttpWebhook>> Connect(
      const std::string& url, std::chrono::milliseconds timeout = std::chrono::seconds(5));
  ~HttpWebhook() override;

  absl::StatusOr<SyncResponse> Sync(const SyncRequest& req) override;
  absl::StatusOr<FinalizeResponse> Finalize(const SyncRequest& req) override;

 private:
  struct Impl;
  explicit HttpWebhook(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

// HTTP front end: POST /sync, POST /finalize, GET /healthz.
class WebhookServer {
 public:
  WebhookServer(VniEndpoint& endpoint, const Clock& clock);
  ~WebhookServer();

  absl::StatusOr<int> Start(const std::string& host, int port);
  void Stop();
  void Wait();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vnimesh::endpoint

#endif  // VNIMESH_ENDPOINT_WEBHOOK_H_
