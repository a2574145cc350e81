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

#include "vnimesh/endpoint/types.h"

#include <cctype>

#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::endpoint {
namespace {

// DNS-1123 subdomain, the rule Kubernetes applies to object names.
bool IsObjectName(std::string_view s) {
  if (s.empty() || s.size() > 253) return false;
  auto alnum = [](char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c));
  };
  if (!alnum(s.front()) || !alnum(s.back())) return false;
  for (char c : s) {
    if (!alnum(c) && c != '-' && c != '.') return false;
  }
  return true;
}

}  // namespace

std::string_view ParentKindName(ParentKind kind) {
  return kind == ParentKind::kJob ? "Job" : "VniClaim";
}

absl::StatusOr<std::optional<VniRequest>> ParseVniAnnotation(
    const std::map<std::string, std::string>& annotations) {
  auto it = annotations.find(std::string(kVniAnnotation));
  if (it == annotations.end()) return std::optional<VniRequest>();
  const std::string& value = it->second;
  if (value == kPerResourceValue) {
    return std::optional<VniRequest>(VniRequest{VniRequest::Model::kPerResource, {}});
  }
  if (!IsObjectName(value)) {
    return MakeError(ErrorKind::kMalformedAnnotation,
                     StrCat("annotation vni='", value, "' is neither \"true\" nor a claim name"));
  }
  return std::optional<VniRequest>(VniRequest{VniRequest::Model::kClaim, value});
}

std::string JobRef(std::string_view ns, std::string_view name) {
  return StrCat("job:", ns, "/", name);
}

std::string ClaimRef(std::string_view ns, std::string_view name) {
  return StrCat("claim:", ns, "/", name);
}

std::string ChildName(std::string_view parent_name) { return StrCat(parent_name, "-vni"); }

}  // namespace vnimesh::endpoint
