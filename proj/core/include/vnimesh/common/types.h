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

#ifndef VNIMESH_COMMON_TYPES_H_
#define VNIMESH_COMMON_TYPES_H_

#include <cstdint>
#include <string>

namespace vnimesh {

// Slingshot virtual network identifier.
using Vni = std::uint16_t;

// Values below this are reserved for a globally accessible VNI and never
// handed out by the allocator.
inline constexpr Vni kFirstUsableVni = 1024;
inline constexpr Vni kLastUsableVni = 65535;

struct VniRange {
  Vni first = kFirstUsableVni;
  Vni last = kLastUsableVni;

  bool Contains(std::uint32_t v) const { return v >= first && v <= last; }
  std::uint32_t size() const { return std::uint32_t{last} - first + 1; }
};

using NodeId = std::string;

}  // namespace vnimesh

#endif  // VNIMESH_COMMON_TYPES_H_
