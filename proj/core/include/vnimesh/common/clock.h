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

#ifndef VNIMESH_COMMON_CLOCK_H_
#define VNIMESH_COMMON_CLOCK_H_

#include <atomic>
#include <chrono>

namespace vnimesh {

// Seconds. Virtual clocks start at zero; the wall clock reports seconds since
// the Unix epoch so persisted release times survive restarts.
using Timestamp = double;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp Now() const = 0;
};

// Manually advanced clock for deterministic tests and virtual-time runs.
// Never moves backwards.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Timestamp start = 0.0) : now_(start) {}

  Timestamp Now() const override { return now_.load(std::memory_order_acquire); }

  // Moves to `t` if it is later than the current time. Returns the new time.
  Timestamp AdvanceTo(Timestamp t);
  Timestamp Advance(double seconds) { return AdvanceTo(Now() + seconds); }

 private:
  std::atomic<Timestamp> now_;
};

class WallClock final : public Clock {
 public:
  Timestamp Now() const override {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
  }
};

// Monotonic seconds since construction; used for in-run measurements where
// system clock adjustments must not leak into delays.
class SteadyClock final : public Clock {
 public:
  SteadyClock() : origin_(std::chrono::steady_clock::now()) {}
  Timestamp Now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
  }

 private:
  std::chrono::steady_clock::time_point origin_;
};

}  // namespace vnimesh

#endif  // VNIMESH_COMMON_CLOCK_H_
