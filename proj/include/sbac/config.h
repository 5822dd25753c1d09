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

#ifndef SBAC_CONFIG_H_
#define SBAC_CONFIG_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbac/live_transport.h"

namespace sbac {

struct ServiceConfig {
  LiveTransportConfig llm;
  std::filesystem::path store_dir = "sbac-sessions";
  int vignette_k = 6;
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

// The process environment.
std::optional<std::string> ProcessEnv(const char* name);

// Reads LLM_ENDPOINT, LLM_API_KEY, LLM_MODEL_FRONTIER, LLM_MODEL_FAST,
// LLM_TEMPERATURE, SBAC_STORE_DIR and SBAC_VIGNETTE_K. Malformed numbers
// throw Error(kInvalidArgument).
ServiceConfig LoadConfig(const EnvLookup& env = ProcessEnv);

// Settings that a live model connection still lacks, by variable name.
std::vector<std::string> MissingLiveSettings(const ServiceConfig& config);

}  // namespace sbac

#endif  // SBAC_CONFIG_H_
