// Copyright 2026 The SBAC Authors.
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

#include "sbac/session_store.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

#include "sbac/errors.h"
#include "sbac/json_util.h"

namespace sbac {
namespace {

std::string Serialize(const SessionState& state) {
  return ToJson(state).dump(2) + "\n";
}

SessionState Deserialize(const std::string& text, const std::string& where) {
  try {
    return SessionStateFromJson(Json::parse(text));
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kStorageError, where + ": " + e.what());
  } catch (const Error& e) {
    Fail(ErrorCode::kStorageError, where + ": " + e.what());
  }
}

void RequireId(std::string_view id) {
  if (!IsValidSessionId(id)) {
    Fail(ErrorCode::kInvalidArgument, "malformed session id");
  }
}

}  // namespace

bool IsValidSessionId(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

FileSessionStore::FileSessionStore(std::filesystem::path dir)
    : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    Fail(ErrorCode::kStorageError,
         "cannot use store directory " + dir_.string() +
             (ec ? ": " + ec.message() : ""));
  }
}

std::filesystem::path FileSessionStore::PathFor(std::string_view id) const {
  RequireId(id);
  return dir_ / (std::string(id) + ".json");
}

std::optional<SessionState> FileSessionStore::Load(std::string_view id) const {
  if (!IsValidSessionId(id)) return std::nullopt;
  std::filesystem::path path = PathFor(id);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    Fail(ErrorCode::kStorageError, "cannot read " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return Deserialize(text.str(), path.string());
}

void FileSessionStore::Save(const SessionState& state) {
  std::filesystem::path path = PathFor(state.session_id);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << Serialize(state);
    out.flush();
    if (!out) {
      Fail(ErrorCode::kStorageError, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    Fail(ErrorCode::kStorageError, "cannot replace " + path.string());
  }
}

std::vector<std::string> FileSessionStore::List() const {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
    if (entry.path().extension() == ".json") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::optional<SessionState> MemorySessionStore::Load(std::string_view id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = docs_.find(id);
  if (it == docs_.end()) return std::nullopt;
  return Deserialize(it->second, "memory");
}

void MemorySessionStore::Save(const SessionState& state) {
  RequireId(state.session_id);
  std::string doc = Serialize(state);
  std::lock_guard<std::mutex> lock(mu_);
  docs_[state.session_id] = std::move(doc);
}

std::vector<std::string> MemorySessionStore::List() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, doc] : docs_) ids.push_back(id);
  return ids;
}

}  // namespace sbac
