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

#include "vnimesh/bench/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vnimesh::bench {

double NearestRank(std::span<const double> sorted, double p) {
  if (sorted.empty()) return 0;
  const double n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

Spread SpreadOf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {NearestRank(values, 50), NearestRank(values, 10), NearestRank(values, 90)};
}

double Mean(std::span<const double> values) {
  if (values.empty()) return 0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

bool IsSinglePeaked(std::span<const std::size_t> counts) {
  bool falling = false;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] < counts[i - 1]) falling = true;
    if (counts[i] > counts[i - 1] && falling) return false;
  }
  return true;
}

}  // namespace vnimesh::bench
