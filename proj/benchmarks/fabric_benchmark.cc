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

#include <vector>

#include "benchmark/benchmark.h"
#include "vnimesh/cxi/fabric.h"

namespace vnimesh::cxi {
namespace {

struct Pair {
  EndpointHandle a;
  EndpointHandle b;
};

Pair Setup(Fabric& fabric, Vni vni_a, Vni vni_b) {
  (void)fabric.CreateService("n0", MemberSpec::Netns(1), {vni_a});
  (void)fabric.CreateService("n1", MemberSpec::Netns(2), {vni_b});
  return {*fabric.AllocEndpoint("n0", {.netns_inode = 1}, vni_a),
          *fabric.AllocEndpoint("n1", {.netns_inode = 2}, vni_b)};
}

void BM_TransmitDelivered(benchmark::State& state) {
  Fabric fabric{"n0", "n1"};
  const Pair p = Setup(fabric, 100, 100);
  const std::vector<std::byte> payload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fabric.Transmit(p.a, p.b, payload));
    if (state.iterations() % 1024 == 0) fabric.Receive(p.b);
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransmitDelivered)->Arg(64)->Arg(4096);

void BM_TransmitDropped(benchmark::State& state) {
  Fabric fabric{"n0", "n1"};
  const Pair p = Setup(fabric, 100, 200);
  const std::vector<std::byte> payload(64);
  for (auto _ : state) benchmark::DoNotOptimize(fabric.Transmit(p.a, p.b, payload));
}
BENCHMARK(BM_TransmitDropped);

// Endpoint allocation walks the node's services for an authorizing match.
void BM_AllocEndpoint(benchmark::State& state) {
  Fabric fabric{"n0"};
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    (void)fabric.CreateService("n0", MemberSpec::Netns(static_cast<std::uint64_t>(1000 + i)),
                               {static_cast<Vni>(1000 + i)});
  }
  const ProcessContext ctx{.netns_inode = static_cast<std::uint64_t>(1000 + state.range(0) - 1)};
  const Vni vni = static_cast<Vni>(1000 + state.range(0) - 1);
  for (auto _ : state) {
    auto h = fabric.AllocEndpoint("n0", ctx, vni);
    benchmark::DoNotOptimize(h);
    (void)fabric.FreeEndpoint(*h);
  }
}
BENCHMARK(BM_AllocEndpoint)->Arg(1)->Arg(64)->Arg(1024);

}  // namespace
}  // namespace vnimesh::cxi

BENCHMARK_MAIN();
