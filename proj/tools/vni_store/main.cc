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

// vni-store: inspect and operate a VNI database file.

#include <cstdio>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "nlohmann/json.hpp"
#include "vnimesh/store/json.h"
#include "vnimesh/store/vni_store.h"

namespace {

int Fail(const absl::Status& s) {
  fmt::print(stderr, "vni-store: {}\n", s.ToString());
  return 1;
}

int Main(int argc, char** argv) {
  CLI::App app{"VNI database"};
  app.require_subcommand(1);
  vnimesh::store::StoreOptions opts;
  app.add_option("--db", opts.path, "SQLite database file")->required();
  app.add_option("--quarantine", opts.quarantine.duration_seconds, "Quarantine seconds");

  CLI::App* dump = app.add_subcommand("dump", "Print every non-free VNI as JSON");
  bool audit = false;
  dump->add_flag("--audit", audit, "Print the audit log instead");

  std::string owner;
  vnimesh::Vni vni = 0;
  CLI::App* acquire = app.add_subcommand("acquire", "Allocate a VNI to an owner");
  acquire->add_option("owner", owner)->required();
  CLI::App* release = app.add_subcommand("release", "Release an owner's VNI");
  release->add_option("vni", vni)->required();
  release->add_option("owner", owner)->required();
  CLI11_PARSE(app, argc, argv);

  auto store = vnimesh::store::VniStore::Open(opts);
  if (!store.ok()) return Fail(store.status());

  if (dump->parsed()) {
    nlohmann::json out = nlohmann::json::array();
    if (audit) {
      auto log = (*store)->AuditLog();
      if (!log.ok()) return Fail(log.status());
      for (const auto& rec : *log) out.push_back(vnimesh::store::ToJson(rec));
    } else {
      auto snap = (*store)->Snapshot();
      if (!snap.ok()) return Fail(snap.status());
      for (const auto& rec : *snap) out.push_back(vnimesh::store::ToJson(rec));
    }
    fmt::print("{}\n", out.dump(2));
    return 0;
  }
  if (acquire->parsed()) {
    auto v = (*store)->Acquire(owner);
    if (!v.ok()) return Fail(v.status());
    fmt::print("{}\n", *v);
    return 0;
  }
  if (auto s = (*store)->Release(vni, owner); !s.ok()) return Fail(s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return Main(argc, argv); }
