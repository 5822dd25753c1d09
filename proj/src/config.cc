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

#include "sbac/config.h"

#include <cstdlib>

#include "sbac/errors.h"

namespace sbac {
namespace {

template <typename T, typename Convert>
T ParseNumber(const std::string& name, const std::string& text, Convert convert) {
  std::size_t used = 0;
  T value{};
  try {
    value = convert(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    Fail(ErrorCode::kInvalidArgument, name + " is not a number: '" + text + "'");
  }
  return value;
}

}  // namespace

std::optional<std::string> ProcessEnv(const char* name) {
  const char* v = std::getenv(name);
  if (!v) return std::nullopt;
  return std::string(v);
}

ServiceConfig LoadConfig(const EnvLookup& env) {
  ServiceConfig c;
  auto get = [&](const char* name) { return env(name).value_or(""); };
  c.llm.endpoint = get("LLM_ENDPOINT");
  c.llm.api_key = get("LLM_API_KEY");
  c.llm.frontier_model = get("LLM_MODEL_FRONTIER");
  c.llm.fast_model = get("LLM_MODEL_FAST");
  if (std::string t = get("LLM_TEMPERATURE"); !t.empty()) {
    c.llm.temperature = ParseNumber<double>(
        "LLM_TEMPERATURE", t,
        [](const std::string& s, std::size_t* n) { return std::stod(s, n); });
  }
  if (std::string dir = get("SBAC_STORE_DIR"); !dir.empty()) c.store_dir = dir;
  if (std::string k = get("SBAC_VIGNETTE_K"); !k.empty()) {
    c.vignette_k = ParseNumber<int>(
        "SBAC_VIGNETTE_K", k,
        [](const std::string& s, std::size_t* n) { return std::stoi(s, n); });
    if (c.vignette_k < 1) {
      Fail(ErrorCode::kInvalidArgument, "SBAC_VIGNETTE_K must be at least 1");
    }
  }
  return c;
}

std::vector<std::string> MissingLiveSettings(const ServiceConfig& config) {
  std::vector<std::string> missing;
  if (config.llm.endpoint.empty()) missing.push_back("LLM_ENDPOINT");
  if (config.llm.api_key.empty()) missing.push_back("LLM_API_KEY");
  if (config.llm.frontier_model.empty()) missing.push_back("LLM_MODEL_FRONTIER");
  if (config.llm.fast_model.empty()) missing.push_back("LLM_MODEL_FAST");
  return missing;
}

}  // namespace sbac
