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

#include "vnimesh/sim/cni_driver.h"

#include "nlohmann/json.hpp"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"
#include "vnimesh/common/subprocess.h"

namespace vnimesh::sim {
namespace {

using nlohmann::ordered_json;

absl::Status StatusFromOutcome(std::string_view command, const cni::Outcome& out) {
  if (out.exit_code == 0) return absl::OkStatus();
  auto err = ordered_json::parse(out.stdout_data, nullptr, false);
  if (!err.is_object() || !err.contains("code")) {
    return absl::InternalError(StrCat("CNI ", command, " exited ", out.exit_code, ": ", out.stdout_data));
  }
  const int code = err["code"].get<int>();
  const std::string msg = StrCat("CNI ", command, ": ", err.value("msg", ""),
                                 err.contains("details") ? StrCat(" (", err["details"].get<std::string>(), ")") : "");
  switch (static_cast<cni::CniErrorCode>(code)) {
    case cni::CniErrorCode::kVniUnavailable:
      return MakeError(ErrorKind::kVniUnavailable, msg);
    case cni::CniErrorCode::kGracePeriodTooLong:
      return MakeError(ErrorKind::kGracePeriodTooLong, msg);
    case cni::CniErrorCode::kManagementApiUnreachable:
      return MakeError(ErrorKind::kManagementApiUnreachable, msg);
    case cni::CniErrorCode::kCxiUnreachable:
      return MakeError(ErrorKind::kCxiUnreachable, msg);
    case cni::CniErrorCode::kPodNotFound:
      return MakeError(ErrorKind::kNotFound, msg);
    default:
      return absl::InternalError(StrCat(msg, " [code ", code, "]"));
  }
}

}  // namespace

cni::Invocation ProtocolCniDriver::BuildInvocation(std::string_view command,
                                                   const PodSandbox& sandbox) const {
  const std::string netns = cni::SimNetnsPath(sandbox.netns_inode);
  ordered_json conf;
  conf["cniVersion"] = settings_.cni_version;
  conf["name"] = "slingshot";
  conf["type"] = "cxi-cni";
  if (!settings_.management_url.empty()) conf["vniManagementApi"] = settings_.management_url;
  if (!settings_.cxi_url.empty()) conf["cxiSocket"] = settings_.cxi_url;
  conf["stateDir"] = (settings_.state_root / sandbox.node).string();
  conf["nodeName"] = sandbox.node;
  conf["runtimeConfig"] = {{"podUid", sandbox.pod_uid}};
  if (command == "ADD") {
    // Result of the interface-creating plugin that runs before us.
    ordered_json prev;
    prev["cniVersion"] = settings_.cni_version;
    prev["interfaces"] = ordered_json::array(
        {{{"name", "eth0"}, {"sandbox", netns}}});
    prev["ips"] = ordered_json::array(
        {{{"address", StrCat("10.", 64 + sandbox.netns_inode % 64, ".", sandbox.netns_inode / 256 % 256,
                             ".", sandbox.netns_inode % 256, "/32")},
          {"interface", 0}}});
    conf["prevResult"] = prev;
  }
  return cni::Invocation{
      .env = {{"CNI_COMMAND", std::string(command)},
              {"CNI_CONTAINERID", sandbox.container_id},
              {"CNI_NETNS", netns},
              {"CNI_IFNAME", "eth0"},
              {"CNI_PATH", "/opt/cni/bin"},
              {"CNI_ARGS", StrCat("IgnoreUnknown=1;K8S_POD_NAMESPACE=", sandbox.ns,
                                  ";K8S_POD_NAME=", sandbox.name, ";K8S_POD_UID=", sandbox.pod_uid)}},
      .stdin_data = conf.dump()};
}

absl::Status ProtocolCniDriver::Invoke(std::string_view command, const PodSandbox& sandbox) {
  ++invocations_;
  auto out = Execute(BuildInvocation(command, sandbox));
  if (!out.ok()) return out.status();
  return StatusFromOutcome(command, *out);
}

absl::Status ProtocolCniDriver::Add(const PodSandbox& sandbox) { return Invoke("ADD", sandbox); }
absl::Status ProtocolCniDriver::Del(const PodSandbox& sandbox) { return Invoke("DEL", sandbox); }

absl::StatusOr<cni::Outcome> InProcessCniDriver::Execute(const cni::Invocation& inv) {
  return cni::Run(inv, clients_);
}

absl::StatusOr<cni::Outcome> ExecCniDriver::Execute(const cni::Invocation& inv) {
  auto result = RunProcess({binary_}, inv.env, inv.stdin_data);
  if (!result.ok()) return result.status();
  return cni::Outcome{result->stdout_data, result->exit_code};
}

}  // namespace vnimesh::sim
