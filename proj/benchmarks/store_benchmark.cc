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

#include <string>

#include "benchmark/benchmark.h"
#include "fmt/format.h"
#include "vnimesh/common/clock.h"
#include "vnimesh/store/vni_store.h"

namespace vnimesh {
namespace {

// One acquire/release cycle per iteration; the virtual clock jumps past the
// quarantine so the pool never runs dry.
void BM_AcquireRelease(benchmark::State& state) {
  VirtualClock clock;
  auto store = store::VniStore::Open({.pool = {.first = 1024, .last = 1024 + 4096},
                                      .quarantine = {.duration_seconds = 30},
                                      .clock = &clock});
  if (!store.ok()) {
    state.SkipWithError(std::string(store.status().message()).c_str());
    return;
  }
  std::uint64_t i = 0;
  for (auto _ : state) {
    const std::string owner = fmt::format("job:bench/j{}", i++);
    auto vni = (*store)->Acquire(owner, clock.Now());
    benchmark::DoNotOptimize(vni);
    (void)(*store)->Release(*vni, owner, clock.Now());
    clock.Advance(0.01);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AcquireRelease);

// Repeated acquire by an existing owner, the replay path of /sync.
void BM_IdempotentAcquire(benchmark::State& state) {
  auto store = store::VniStore::Open({});
  if (!store.ok()) {
    state.SkipWithError(std::string(store.status().message()).c_str());
    return;
  }
  (void)(*store)->Acquire("job:bench/held", 0);
  for (auto _ : state) benchmark::DoNotOptimize((*store)->Acquire("job:bench/held", 0));
}
BENCHMARK(BM_IdempotentAcquire);

// Cost of choosing a VNI as the quarantined set grows.
void BM_AcquireWithQuarantined(benchmark::State& state) {
  VirtualClock clock;
  auto store = store::VniStore::Open({.pool = {.first = 1024, .last = 65535},
                                      .quarantine = {.duration_seconds = 1e9},
                                      .clock = &clock});
  if (!store.ok()) {
    state.SkipWithError(std::string(store.status().message()).c_str());
    return;
  }
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    const std::string owner = fmt::format("job:warm/j{}", i);
    auto vni = (*store)->Acquire(owner, 0);
    (void)(*store)->Release(*vni, owner, 0);
  }
  std::uint64_t i = 0;
  for (auto _ : state) {
    const std::string owner = fmt::format("job:bench/j{}", i++);
    auto vni = (*store)->Acquire(owner, 1);
    benchmark::DoNotOptimize(vni);
    state.PauseTiming();
    (void)(*store)->Release(*vni, owner, 1);
    state.ResumeTiming();
  }
}
BENCHMARK(BM_AcquireWithQuarantined)->Arg(0)->Arg(1000)->Arg(10000);

}  // namespace
}  // namespace vnimesh

BENCHMARK_MAIN();
