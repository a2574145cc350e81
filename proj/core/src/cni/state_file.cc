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

#include "vnimesh/cni/state_file.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "vnimesh/common/errors.h"
#include "vnimesh/common/strings.h"

namespace vnimesh::cni {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

absl::Status IoError(std::string_view what, const fs::path& p) {
  return MakeError(ErrorKind::kIo, StrCat(what, " ", p.string(), ": ", std::strerror(errno)));
}

class FileLock {
 public:
  FileLock(const fs::path& path, int op) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) return;
    while (::flock(fd_, op) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        fd_ = -1;
        return;
      }
    }
  }
  ~FileLock() {
    if (fd_ >= 0) ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;
  bool held() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

absl::StatusOr<StateMap> Load(const fs::path& path) {
  StateMap out;
  std::ifstream in(path);
  if (!in) return out;
  std::stringstream buf;
  buf << in.rdbuf();
  if (buf.str().empty()) return out;
  auto doc = json::parse(buf.str(), nullptr, false);
  if (!doc.is_object()) return MakeError(ErrorKind::kIo, StrCat("corrupt state file ", path.string()));
  try {
    for (const auto& [id, e] : doc.items()) {
      out[id] = StateEntry{.node = e.at("node").get<std::string>(),
                           .netns_inode = e.at("netns").get<std::uint64_t>(),
                           .vni = e.at("vni").get<Vni>(),
                           .services = e.at("services").get<std::vector<cxi::ServiceId>>()};
    }
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kIo, StrCat("corrupt state file ", path.string(), ": ", e.what()));
  }
  return out;
}

absl::Status Store(const fs::path& path, const StateMap& state) {
  json doc = json::object();
  for (const auto& [id, e] : state) {
    doc[id] = {{"node", e.node}, {"netns", e.netns_inode}, {"vni", e.vni},
               {"services", e.services}};
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) return IoError("cannot write", tmp);
    out << doc.dump(2) << '\n';
    if (!out.flush()) return IoError("cannot write", tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) return MakeError(ErrorKind::kIo, StrCat("rename ", tmp.string(), ": ", ec.message()));
  return absl::OkStatus();
}

}  // namespace

StateFile::StateFile(fs::path dir)
    : dir_(std::move(dir)), path_(dir_ / "cxi-cni-state.json"), lock_path_(dir_ / "cxi-cni-state.lock") {}

absl::Status StateFile::Update(const std::function<absl::Status(StateMap&)>& fn) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) return MakeError(ErrorKind::kIo, StrCat("mkdir ", dir_.string(), ": ", ec.message()));
  FileLock lock(lock_path_, LOCK_EX);
  if (!lock.held()) return IoError("cannot lock", lock_path_);
  auto state = Load(path_);
  if (!state.ok()) return state.status();
  if (absl::Status s = fn(*state); !s.ok()) return s;
  return Store(path_, *state);
}

absl::StatusOr<StateMap> StateFile::Read() const {
  if (!fs::exists(dir_)) return StateMap{};
  FileLock lock(lock_path_, LOCK_SH);
  if (!lock.held()) return IoError("cannot lock", lock_path_);
  return Load(path_);
}

}  // namespace vnimesh::cni
