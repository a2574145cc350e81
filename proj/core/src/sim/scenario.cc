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

#include "vnimesh/sim/scenario.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>

#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"
#include "vnimesh/sim/json.h"

namespace vnimesh::sim {

using nlohmann::json;

absl::StatusOr<Scenario> ScenarioFromJson(const json& j) {
  try {
    Scenario out;
    out.nodes = j.value("nodes", std::vector<NodeId>{});
    if (j.contains("seed")) out.seed = j["seed"].get<std::uint64_t>();
    for (const json& e : j.at("events")) {
      ScenarioEvent ev;
      ev.at = e.value("at", 0.0);
      if (e.contains("submit")) {
        auto obj = ResourceObjectFromJson(e["submit"]);
        if (!obj.ok()) return obj.status();
        ev.submit = *std::move(obj);
      } else if (e.contains("delete")) {
        const json& d = e["delete"];
        auto kind = ParseKind(d.at("kind").get<std::string>());
        if (!kind) return MakeError(ErrorKind::kMalformedRequest, "unknown kind in delete");
        ev.delete_kind = *kind;
        ev.ns = d.value("namespace", "default");
        ev.name = d.at("name").get<std::string>();
      } else {
        return MakeError(ErrorKind::kMalformedRequest, "event needs submit or delete");
      }
      out.events.push_back(std::move(ev));
    }
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const auto& a, const auto& b) { return a.at < b.at; });
    return out;
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kMalformedRequest, StrCat("scenario: ", e.what()));
  }
}

absl::StatusOr<Scenario> LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return MakeError(ErrorKind::kIo, StrCat("cannot open ", path.string()));
  auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) return MakeError(ErrorKind::kMalformedRequest, StrCat(path.string(), ": not JSON"));
  return ScenarioFromJson(doc);
}

void ApplyScenario(const Scenario& scenario, EnvironmentOptions& options) {
  if (!scenario.nodes.empty()) options.cluster.nodes = scenario.nodes;
  if (scenario.seed) options.cluster.seed = *scenario.seed;
}

namespace {

absl::Status Apply(Cluster& cluster, const ScenarioEvent& ev) {
  if (ev.submit) return cluster.Submit(*ev.submit).status();
  return cluster.RequestDelete(ev.delete_kind, ev.ns, ev.name);
}

}  // namespace

absl::StatusOr<EnvironmentSummary> RunScenario(Environment& env, const Scenario& scenario,
                                               double wall_timeout_seconds) {
  if (VirtualClock* clock = env.virtual_clock()) {
    const Timestamp origin = clock->Now();
    for (const ScenarioEvent& ev : scenario.events) {
      if (absl::Status s = env.RunUntil(origin + ev.at); !s.ok()) return s;
      if (absl::Status s = Apply(env.cluster(), ev); !s.ok()) return s;
    }
    return env.RunUntilQuiescent();
  }
  const auto start = std::chrono::steady_clock::now();
  for (const ScenarioEvent& ev : scenario.events) {
    std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                              std::chrono::duration<double>(ev.at)));
    if (absl::Status s = Apply(env.cluster(), ev); !s.ok()) return s;
  }
  if (!env.WaitQuiescent(wall_timeout_seconds)) {
    return MakeError(ErrorKind::kNonQuiescent, "scenario did not settle before the timeout");
  }
  return env.Summarize();
}

}  // namespace vnimesh::sim
