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

#include "vnimesh/common/clock.h"

namespace vnimesh {

Timestamp VirtualClock::AdvanceTo(Timestamp t) {
  Timestamp current = now_.load(std::memory_order_acquire);
  while (t > current &&
         !now_.compare_exchange_weak(current, t, std::memory_order_acq_rel)) {
  }
  return now_.load(std::memory_order_acquire);
}

}  // namespace vnimesh
