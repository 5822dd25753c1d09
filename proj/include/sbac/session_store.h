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

#ifndef SBAC_SESSION_STORE_H_
#define SBAC_SESSION_STORE_H_

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbac/session_state.h"

namespace sbac {

// Session ids are 1-64 characters of [A-Za-z0-9_-].
bool IsValidSessionId(std::string_view id);

class SessionStore {
 public:
  virtual ~SessionStore() = default;

  // nullopt when there is no such session. Throws Error(kStorageError) when
  // a stored document cannot be read.
  virtual std::optional<SessionState> Load(std::string_view id) const = 0;
  // Throws Error(kStorageError).
  virtual void Save(const SessionState& state) = 0;
  virtual std::vector<std::string> List() const = 0;
};

// One JSON document per session, replaced atomically on save.
class FileSessionStore : public SessionStore {
 public:
  // Creates `dir` if needed. Throws Error(kStorageError).
  explicit FileSessionStore(std::filesystem::path dir);

  std::optional<SessionState> Load(std::string_view id) const override;
  void Save(const SessionState& state) override;
  std::vector<std::string> List() const override;

  std::filesystem::path PathFor(std::string_view id) const;

 private:
  std::filesystem::path dir_;
};

// Keeps serialized documents, so a load never aliases a saved state.
class MemorySessionStore : public SessionStore {
 public:
  std::optional<SessionState> Load(std::string_view id) const override;
  void Save(const SessionState& state) override;
  std::vector<std::string> List() const override;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string, std::less<>> docs_;
};

}  // namespace sbac

#endif  // SBAC_SESSION_STORE_H_
