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

#ifndef VNIMESH_CXI_FABRIC_H_
#define VNIMESH_CXI_FABRIC_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "vnimesh/common/types.h"

namespace vnimesh::cxi {

enum class MemberKind { kUid, kGid, kNetns };

std::string_view MemberKindName(MemberKind kind);  // "uid" | "gid" | "netns"
std::optional<MemberKind> ParseMemberKind(std::string_view name);

// The credential a CXI service authorizes. NETNS values are network namespace
// inode numbers and carry no arithmetic meaning.
class MemberSpec {
 public:
  constexpr MemberSpec(MemberKind kind, std::uint64_t value) : kind_(kind), value_(value) {}

  static constexpr MemberSpec Uid(std::uint64_t uid) { return {MemberKind::kUid, uid}; }
  static constexpr MemberSpec Gid(std::uint64_t gid) { return {MemberKind::kGid, gid}; }
  static constexpr MemberSpec Netns(std::uint64_t inode) { return {MemberKind::kNetns, inode}; }

  constexpr MemberKind kind() const { return kind_; }
  constexpr std::uint64_t value() const { return value_; }

  friend bool operator==(const MemberSpec&, const MemberSpec&) = default;

 private:
  MemberKind kind_;
  std::uint64_t value_;
};

// Credentials of the process requesting an endpoint, as the driver would read
// them from the task struct and procfs.
struct ProcessContext {
  std::uint64_t uid = 0;
  std::uint64_t gid = 0;
  std::uint64_t netns_inode = 0;
};

// True iff the context field selected by the member's kind equals its value.
bool MemberMatches(const MemberSpec& member, const ProcessContext& ctx);

using ServiceId = std::uint64_t;
using EndpointId = std::uint64_t;

struct CxiService {
  ServiceId id = 0;
  NodeId node;
  MemberSpec member = MemberSpec::Uid(0);
  std::set<Vni> vnis;
  std::optional<std::uint64_t> max_endpoints;
  std::uint64_t active_endpoints = 0;

  friend bool operator==(const CxiService&, const CxiService&) = default;
};

struct EndpointHandle {
  NodeId node;
  EndpointId endpoint_id = 0;
  Vni vni = 0;
  ServiceId service_id = 0;

  friend bool operator==(const EndpointHandle&, const EndpointHandle&) = default;
};

enum class DropReason { kVniMismatch, kNoService, kDeadEndpoint };
std::string_view DropReasonName(DropReason reason);

struct TransmitResult {
  std::optional<DropReason> dropped;  // nullopt means delivered

  bool delivered() const { return !dropped.has_value(); }
  static TransmitResult Delivered() { return {}; }
  static TransmitResult Dropped(DropReason reason) { return {reason}; }
  friend bool operator==(const TransmitResult&, const TransmitResult&) = default;
};

// A set of simulated CXI NICs joined by a switch fabric. Each node owns a
// service registry and its live endpoints; the switch delivers a packet only
// when both ends are live, authorized, and on the same VNI.
//
// Thread-safe. Registry operations on a node are linearizable; Transmit locks
// both endpoint nodes and therefore observes one consistent snapshot.
class Fabric {
 public:
  Fabric() = default;
  explicit Fabric(std::span<const NodeId> nodes);
  Fabric(std::initializer_list<NodeId> nodes);

  Fabric(const Fabric&) = delete;
  Fabric& operator=(const Fabric&) = delete;

  // No-op if the node already exists.
  void AddNode(const NodeId& node);
  std::vector<NodeId> Nodes() const;

  absl::StatusOr<ServiceId> CreateService(const NodeId& node, MemberSpec member,
                                          std::set<Vni> vnis,
                                          std::optional<std::uint64_t> max_endpoints = {});
  absl::Status DeleteService(const NodeId& node, ServiceId id);
  absl::StatusOr<std::vector<CxiService>> ListServices(const NodeId& node) const;

  // Authenticates `ctx` against the node's services. The lowest-id service
  // that grants `vni` to a matching member and still has endpoint capacity
  // authorizes the endpoint.
  absl::StatusOr<EndpointHandle> AllocEndpoint(const NodeId& node, const ProcessContext& ctx,
                                               Vni vni);
  absl::Status FreeEndpoint(const EndpointHandle& handle);

  TransmitResult Transmit(const EndpointHandle& src, const EndpointHandle& dst,
                          std::span<const std::byte> payload);

  // Pops everything delivered to `handle` so far.
  std::vector<std::vector<std::byte>> Receive(const EndpointHandle& handle);

  std::size_t TotalServices() const;

 private:
  struct Endpoint {
    Vni vni;
    ServiceId service_id;
    std::vector<std::vector<std::byte>> rx;
  };
  struct Node {
    mutable std::mutex mu;
    ServiceId next_service_id = 1;
    EndpointId next_endpoint_id = 1;
    std::map<ServiceId, CxiService> services;
    std::map<EndpointId, Endpoint> endpoints;
  };

  Node* FindNode(const NodeId& node) const;

  mutable std::shared_mutex nodes_mu_;
  std::map<NodeId, std::unique_ptr<Node>> nodes_;
};

}  // namespace vnimesh::cxi

#endif  // VNIMESH_CXI_FABRIC_H_
