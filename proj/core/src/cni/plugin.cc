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

#include "vnimesh/cni/plugin.h"

#include <sys/stat.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <memory>
#include <thread>
#include <utility>

#include "nlohmann/json.hpp"
#include "vnimesh/cni/state_file.h"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::cni {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kLatestVersion = kSupportedVersions.back();
constexpr std::string_view kSimNetnsPrefix = "simns-";
constexpr int kDelAttempts = 3;
constexpr auto kDelBackoff = std::chrono::milliseconds(100);

struct Failure {
  CniErrorCode code;
  std::string msg;
  std::string details;
};

Failure FromStatus(const absl::Status& status, CniErrorCode fallback, std::string msg) {
  CniErrorCode code = fallback;
  switch (KindOf(status).value_or(ErrorKind::kIo)) {
    case ErrorKind::kManagementApiUnreachable:
      code = CniErrorCode::kManagementApiUnreachable;
      break;
    case ErrorKind::kCxiUnreachable:
      code = CniErrorCode::kCxiUnreachable;
      break;
    case ErrorKind::kIo:
      if (KindOf(status)) code = CniErrorCode::kIoFailure;
      break;
    default:
      break;
  }
  return Failure{code, std::move(msg), std::string(status.message())};
}

Outcome ErrorOutcome(std::string_view version, const Failure& f) {
  ordered_json err;
  err["cniVersion"] = version;
  err["code"] = static_cast<int>(f.code);
  err["msg"] = f.msg;
  if (!f.details.empty()) err["details"] = f.details;
  return Outcome{err.dump(), 1};
}

std::string EnvOr(const Invocation& inv, const std::string& key) {
  auto it = inv.env.find(key);
  return it == inv.env.end() ? std::string() : it->second;
}

// CNI_ARGS is "K1=V1;K2=V2".
std::string CniArg(std::string_view args, std::string_view key) {
  while (!args.empty()) {
    const auto semi = args.find(';');
    std::string_view pair = args.substr(0, semi);
    const auto eq = pair.find('=');
    if (eq != std::string_view::npos && pair.substr(0, eq) == key) {
      return std::string(pair.substr(eq + 1));
    }
    if (semi == std::string_view::npos) break;
    args.remove_prefix(semi + 1);
  }
  return {};
}

// Returns the exact source text of a top-level member of the JSON object in
// `doc`, or nullopt. `doc` must already have parsed successfully.
std::optional<std::string_view> RawMember(std::string_view doc, std::string_view key) {
  std::size_t i = 0;
  const auto skip_ws = [&] {
    while (i < doc.size() && (doc[i] == ' ' || doc[i] == '\t' || doc[i] == '\n' || doc[i] == '\r')) ++i;
  };
  // Advances past the string starting at doc[i] == '"'.
  const auto skip_string = [&] {
    for (++i; i < doc.size() && doc[i] != '"'; ++i) {
      if (doc[i] == '\\') ++i;
    }
    ++i;
  };
  const auto skip_value = [&] {
    int depth = 0;
    while (i < doc.size()) {
      const char c = doc[i];
      if (c == '"') {
        skip_string();
        if (depth == 0) return;
        continue;
      }
      if (c == '{' || c == '[') {
        ++depth;
      } else if (c == '}' || c == ']') {
        if (depth == 0) return;
        if (--depth == 0) {
          ++i;
          return;
        }
      } else if (c == ',' && depth == 0) {
        return;
      }
      ++i;
    }
  };
  skip_ws();
  if (i >= doc.size() || doc[i] != '{') return std::nullopt;
  ++i;
  while (i < doc.size()) {
    skip_ws();
    if (i >= doc.size() || doc[i] != '"') return std::nullopt;
    const std::size_t key_start = i;
    skip_string();
    // Keys with escapes never match a plain key; compare the raw bytes.
    const std::string_view raw_key = doc.substr(key_start + 1, i - key_start - 2);
    skip_ws();
    ++i;  // ':'
    skip_ws();
    const std::size_t value_start = i;
    skip_value();
    std::size_t value_end = i;
    while (value_end > value_start && (doc[value_end - 1] == ' ' || doc[value_end - 1] == '\t' ||
                                       doc[value_end - 1] == '\n' || doc[value_end - 1] == '\r')) {
      --value_end;
    }
    if (raw_key == key) return doc.substr(value_start, value_end - value_start);
    skip_ws();
    if (i >= doc.size() || doc[i] != ',') return std::nullopt;
    ++i;
  }
  return std::nullopt;
}

// Result handed to the next plugin in the chain: the previous result, byte
// for byte.
std::string ChainedResult(std::string_view raw_config, const ordered_json& config,
                          std::string_view version) {
  if (auto raw = RawMember(raw_config, "prevResult")) return std::string(*raw);
  if (config.contains("prevResult")) return config["prevResult"].dump();
  ordered_json empty;
  empty["cniVersion"] = version;
  return empty.dump();
}

class Execution {
 public:
  Execution(const Invocation& inv, const Clients& clients) : inv_(inv), clients_(clients) {}

  Outcome Run() {
    const std::string command = EnvOr(inv_, "CNI_COMMAND");
    if (command.empty()) return Error({CniErrorCode::kInvalidEnvironment, "CNI_COMMAND not set", ""});
    if (command == "VERSION") return Version();

    config_ = ordered_json::parse(inv_.stdin_data, nullptr, false);
    if (config_.is_discarded() || !config_.is_object()) {
      return Error({CniErrorCode::kDecodeFailure, "cannot decode network configuration", ""});
    }
    if (!config_.contains("cniVersion") || !config_["cniVersion"].is_string()) {
      return Error({CniErrorCode::kInvalidConfig, "cniVersion missing", ""});
    }
    version_ = config_["cniVersion"].get<std::string>();
    if (std::find(kSupportedVersions.begin(), kSupportedVersions.end(), version_) ==
        kSupportedVersions.end()) {
      return Error({CniErrorCode::kIncompatibleVersion,
                    "incompatible CNI version",
                    StrCat("plugin supports 0.4.0, 1.0.0, 1.1.0; config requested ", version_)});
    }
    container_id_ = EnvOr(inv_, "CNI_CONTAINERID");
    if (container_id_.empty()) {
      return Error({CniErrorCode::kInvalidEnvironment, "CNI_CONTAINERID not set", ""});
    }
    if (!config_.contains("stateDir") || !config_["stateDir"].is_string()) {
      return Error({CniErrorCode::kInvalidConfig, "stateDir missing", ""});
    }
    state_ = std::make_unique<StateFile>(config_["stateDir"].get<std::string>());

    if (command == "ADD") return Add();
    if (command == "DEL") return Del();
    if (command == "CHECK") return Check();
    return Error({CniErrorCode::kInvalidEnvironment, StrCat("unknown CNI_COMMAND ", command), ""});
  }

 private:
  Outcome Error(const Failure& f) const {
    return ErrorOutcome(version_.empty() ? kLatestVersion : version_, f);
  }

  Outcome Version() {
    auto config = ordered_json::parse(inv_.stdin_data, nullptr, false);
    std::string requested(kLatestVersion);
    if (config.is_object() && config.contains("cniVersion") && config["cniVersion"].is_string()) {
      requested = config["cniVersion"].get<std::string>();
    }
    ordered_json out;
    out["cniVersion"] = requested;
    out["supportedVersions"] = kSupportedVersions;
    return Outcome{out.dump(), 0};
  }

  std::string PodUid() const {
    if (config_.contains("runtimeConfig") && config_["runtimeConfig"].is_object()) {
      const auto& rc = config_["runtimeConfig"];
      if (rc.contains("podUid") && rc["podUid"].is_string()) return rc["podUid"].get<std::string>();
    }
    return CniArg(EnvOr(inv_, "CNI_ARGS"), "K8S_POD_UID");
  }

  std::optional<Failure> Management(ManagementClient*& out) {
    if (clients_.management) {
      out = clients_.management;
      return std::nullopt;
    }
    if (!config_.contains("vniManagementApi") || !config_["vniManagementApi"].is_string()) {
      return Failure{CniErrorCode::kInvalidConfig, "vniManagementApi missing", ""};
    }
    auto client = HttpManagementClient::Connect(config_["vniManagementApi"].get<std::string>());
    if (!client.ok()) {
      return Failure{CniErrorCode::kInvalidConfig, "bad vniManagementApi", std::string(client.status().message())};
    }
    owned_management_ = *std::move(client);
    out = owned_management_.get();
    return std::nullopt;
  }

  std::optional<Failure> Cxi(cxi::CxiControl*& out) {
    if (clients_.cxi) {
      out = clients_.cxi;
      return std::nullopt;
    }
    if (!config_.contains("cxiSocket") || !config_["cxiSocket"].is_string()) {
      return Failure{CniErrorCode::kInvalidConfig, "cxiSocket missing", ""};
    }
    auto client = cxi::HttpCxiControl::Connect(config_["cxiSocket"].get<std::string>());
    if (!client.ok()) {
      return Failure{CniErrorCode::kInvalidConfig, "bad cxiSocket", std::string(client.status().message())};
    }
    owned_cxi_ = *std::move(client);
    out = owned_cxi_.get();
    return std::nullopt;
  }

  // Looks the pod up and reports whether it asks for a VNI.
  std::optional<Failure> LookupPod(PodInfo& pod) {
    const std::string uid = PodUid();
    if (uid.empty()) {
      return Failure{CniErrorCode::kInvalidConfig, "pod uid unknown",
                     "set runtimeConfig.podUid or K8S_POD_UID in CNI_ARGS"};
    }
    ManagementClient* management = nullptr;
    if (auto f = Management(management)) return f;
    auto info = management->GetPod(uid);
    if (!info.ok()) {
      if (Is(info.status(), ErrorKind::kNotFound)) {
        return Failure{CniErrorCode::kPodNotFound, StrCat("pod ", uid, " not found"), ""};
      }
      return FromStatus(info.status(), CniErrorCode::kManagementApiUnreachable,
                        "management API query failed");
    }
    pod = *std::move(info);
    return std::nullopt;
  }

  Outcome Add() {
    const std::string netns = EnvOr(inv_, "CNI_NETNS");
    if (netns.empty()) return Error({CniErrorCode::kInvalidEnvironment, "CNI_NETNS not set", ""});
    if (EnvOr(inv_, "CNI_IFNAME").empty()) {
      return Error({CniErrorCode::kInvalidEnvironment, "CNI_IFNAME not set", ""});
    }
    auto existing = state_->Read();
    if (!existing.ok()) return Error(FromStatus(existing.status(), CniErrorCode::kIoFailure, "state file"));
    if (existing->contains(container_id_)) return Passthrough();

    PodInfo pod;
    if (auto f = LookupPod(pod)) return Error(*f);
    if (!pod.annotations.contains("vni")) return Passthrough();
    if (pod.grace_period_seconds > kMaxGracePeriodSeconds) {
      return Error({CniErrorCode::kGracePeriodTooLong, "termination grace period too long",
                    StrCat("pod ", pod.ns, "/", pod.name, " requests ", pod.grace_period_seconds,
                           " s; VNI pods allow at most ", kMaxGracePeriodSeconds, " s")});
    }
    if (!pod.vni) {
      return Error({CniErrorCode::kVniUnavailable, "no VNI bound to pod",
                    StrCat("job ", pod.ns, "/", pod.job, " has no VniCrd")});
    }
    auto inode = NetnsInode(netns);
    if (!inode.ok()) {
      return Error({CniErrorCode::kInvalidEnvironment, "cannot read netns inode",
                    std::string(inode.status().message())});
    }
    std::string node = pod.node;
    if (config_.contains("nodeName") && config_["nodeName"].is_string()) {
      node = config_["nodeName"].get<std::string>();
    }
    cxi::CxiControl* cxi = nullptr;
    if (auto f = Cxi(cxi)) return Error(*f);

    std::optional<Failure> failure;
    absl::Status s = state_->Update([&](StateMap& state) -> absl::Status {
      if (state.contains(container_id_)) return absl::OkStatus();
      cxi::CreateServiceRequest req{.member = cxi::MemberSpec::Netns(*inode), .vnis = {*pod.vni},
                                     .max_endpoints = std::nullopt};
      auto id = cxi->CreateService(node, req);
      if (!id.ok()) {
        failure = FromStatus(id.status(), CniErrorCode::kCxiUnreachable, "cannot create CXI service");
        return id.status();
      }
      state[container_id_] =
          StateEntry{.node = node, .netns_inode = *inode, .vni = *pod.vni, .services = {*id}};
      created_ = {node, *id};
      return absl::OkStatus();
    });
    if (!s.ok()) {
      if (created_) (void)cxi->DeleteService(created_->first, created_->second);
      return Error(failure ? *failure : FromStatus(s, CniErrorCode::kIoFailure, "state file"));
    }
    return Passthrough();
  }

  Outcome Del() {
    cxi::CxiControl* cxi = nullptr;
    std::optional<Failure> failure;
    absl::Status s = state_->Update([&](StateMap& state) -> absl::Status {
      auto it = state.find(container_id_);
      if (it == state.end()) return absl::OkStatus();
      if (auto f = Cxi(cxi)) {
        failure = f;
        return absl::FailedPreconditionError(f->msg);
      }
      auto& services = it->second.services;
      while (!services.empty()) {
        absl::Status del;
        for (int attempt = 0; attempt < kDelAttempts; ++attempt) {
          if (attempt > 0) std::this_thread::sleep_for(kDelBackoff);
          del = cxi->DeleteService(it->second.node, services.back());
          if (!Is(del, ErrorKind::kCxiUnreachable)) break;
        }
        if (!del.ok() && !Is(del, ErrorKind::kUnknownService)) {
          failure = FromStatus(del, CniErrorCode::kCxiUnreachable, "cannot delete CXI service");
          return del;
        }
        services.pop_back();
      }
      state.erase(it);
      return absl::OkStatus();
    });
    if (!s.ok()) return Error(failure ? *failure : FromStatus(s, CniErrorCode::kIoFailure, "state file"));
    return Outcome{"", 0};
  }

  Outcome Check() {
    auto state = state_->Read();
    if (!state.ok()) return Error(FromStatus(state.status(), CniErrorCode::kIoFailure, "state file"));
    if (state->contains(container_id_)) return Outcome{"", 0};
    PodInfo pod;
    if (auto f = LookupPod(pod)) return Error(*f);
    if (pod.annotations.contains("vni")) {
      return Error({CniErrorCode::kVniUnavailable, "no CXI service recorded for container",
                    container_id_});
    }
    return Outcome{"", 0};
  }

  Outcome Passthrough() const { return Outcome{ChainedResult(inv_.stdin_data, config_, version_), 0}; }

  const Invocation& inv_;
  const Clients& clients_;
  ordered_json config_;
  std::string version_;
  std::string container_id_;
  std::unique_ptr<StateFile> state_;
  std::unique_ptr<ManagementClient> owned_management_;
  std::unique_ptr<cxi::CxiControl> owned_cxi_;
  std::optional<std::pair<NodeId, cxi::ServiceId>> created_;
};

}  // namespace

Outcome Run(const Invocation& inv, const Clients& clients) {
  try {
    return Execution(inv, clients).Run();
  } catch (const std::exception& e) {
    return ErrorOutcome(kLatestVersion, Failure{CniErrorCode::kIoFailure, "internal error", e.what()});
  }
}

absl::StatusOr<std::uint64_t> NetnsInode(const std::string& netns_path) {
  const std::string base = std::filesystem::path(netns_path).filename().string();
  if (base.starts_with(kSimNetnsPrefix)) {
    std::string_view digits = std::string_view(base).substr(kSimNetnsPrefix.size());
    std::uint64_t inode = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), inode);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && inode != 0) return inode;
    return absl::InvalidArgumentError(StrCat("bad simulated netns path ", netns_path));
  }
  struct stat st {};
  if (::stat(netns_path.c_str(), &st) != 0) {
    return absl::NotFoundError(StrCat("stat ", netns_path, " failed"));
  }
  return static_cast<std::uint64_t>(st.st_ino);
}

std::string SimNetnsPath(std::uint64_t inode) {
  return StrCat("/var/run/netns/", kSimNetnsPrefix, inode);
}

}  // namespace vnimesh::cni
