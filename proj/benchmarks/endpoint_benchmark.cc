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

#include <memory>
#include <string>

#include "benchmark/benchmark.h"
#include "fmt/format.h"
#include "vnimesh/endpoint/json.h"
#include "vnimesh/endpoint/vni_endpoint.h"
#include "vnimesh/store/vni_store.h"

namespace vnimesh::endpoint {
namespace {

Parent AnnotatedJob(std::string name) {
  return {.kind = ParentKind::kJob, .ns = "bench", .name = std::move(name),
          .annotations = {{"vni", "true"}}};
}

// First sync of a fresh Per-Resource job: one store transaction plus the
// desired VniCrd.
void BM_SyncNewJob(benchmark::State& state) {
  // The pool holds 64512 VNIs, so the store is replaced before it runs dry.
  constexpr std::uint64_t kPerStore = 50'000;
  std::unique_ptr<store::VniStore> store;
  std::unique_ptr<VniEndpoint> endpoint;
  std::uint64_t i = 0;
  for (auto _ : state) {
    if (i % kPerStore == 0) {
      state.PauseTiming();
      endpoint.reset();
      auto opened = store::VniStore::Open({});
      if (!opened.ok()) {
        state.SkipWithError(std::string(opened.status().message()).c_str());
        return;
      }
      store = std::move(*opened);
      endpoint = std::make_unique<VniEndpoint>(*store);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(endpoint->HandleSync({AnnotatedJob(fmt::format("j{}", i++)), {}}, 0));
  }
}
BENCHMARK(BM_SyncNewJob);

// Controller resync of an already bound job.
void BM_SyncReplay(benchmark::State& state) {
  auto store = store::VniStore::Open({});
  if (!store.ok()) {
    state.SkipWithError(std::string(store.status().message()).c_str());
    return;
  }
  VniEndpoint endpoint(**store);
  const Parent parent = AnnotatedJob("bound");
  auto first = endpoint.HandleSync({parent, {}}, 0);
  const SyncRequest replay{parent, first->children};
  for (auto _ : state) benchmark::DoNotOptimize(endpoint.HandleSync(replay, 1));
}
BENCHMARK(BM_SyncReplay);

// Wire decoding and encoding around a sync, as the HTTP webhook does it.
void BM_SyncJsonRoundTrip(benchmark::State& state) {
  auto store = store::VniStore::Open({});
  if (!store.ok()) {
    state.SkipWithError(std::string(store.status().message()).c_str());
    return;
  }
  VniEndpoint endpoint(**store);
  const Parent parent = AnnotatedJob("bound");
  auto first = endpoint.HandleSync({parent, {}}, 0);
  const std::string body = ToJson(SyncRequest{parent, first->children}).dump();
  for (auto _ : state) {
    auto req = SyncRequestFromJson(nlohmann::json::parse(body));
    auto resp = endpoint.HandleSync(*req, 1);
    benchmark::DoNotOptimize(ToJson(*resp).dump());
  }
}
BENCHMARK(BM_SyncJsonRoundTrip);

}  // namespace
}  // namespace vnimesh::endpoint

BENCHMARK_MAIN();
