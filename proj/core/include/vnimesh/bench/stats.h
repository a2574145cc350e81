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

#ifndef VNIMESH_BENCH_STATS_H_
#define VNIMESH_BENCH_STATS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace vnimesh::bench {

// Nearest-rank percentile of an ascending sample: the element at 1-based
// rank ceil(p/100 * n), clamped to [1, n]. 0 for an empty sample.
double NearestRank(std::span<const double> sorted, double p);

struct Spread {
  double median = 0;
  double p10 = 0;
  double p90 = 0;
};

Spread SpreadOf(std::vector<double> values);
double Mean(std::span<const double> values);

// True when the sequence never rises again after it has fallen.
bool IsSinglePeaked(std::span<const std::size_t> counts);

}  // namespace vnimesh::bench

#endif  // VNIMESH_BENCH_STATS_H_
