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

#include "vnimesh/store/json.h"

namespace vnimesh::store {

nlohmann::json ToJson(const VniRecord& rec) {
  nlohmann::json j{{"vni", rec.vni}, {"state", VniStateName(rec.state)}, {"users", rec.users}};
  j["owner"] = rec.owner ? nlohmann::json(*rec.owner) : nlohmann::json(nullptr);
  j["released_at"] = rec.released_at ? nlohmann::json(*rec.released_at) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json ToJson(const AuditRecord& rec) {
  return nlohmann::json{{"seq", rec.seq},
                        {"at", rec.at},
                        {"op", AuditOpName(rec.op)},
                        {"vni", rec.vni},
                        {"actor", rec.actor},
                        {"outcome", rec.ok() ? "ok" : "denied"},
                        {"reason", rec.denied}};
}

}  // namespace vnimesh::store
