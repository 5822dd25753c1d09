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

#include <map>

#include <gtest/gtest.h>

#include "sbac/config.h"
#include "sbac/errors.h"

namespace sbac {
namespace {

EnvLookup FakeEnv(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const char* name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

TEST(Config, DefaultsWithEmptyEnvironment) {
  ServiceConfig c = LoadConfig(FakeEnv({}));
  EXPECT_EQ(c.vignette_k, 6);
  EXPECT_EQ(c.store_dir, "sbac-sessions");
  EXPECT_FALSE(c.llm.temperature.has_value());
  EXPECT_EQ(MissingLiveSettings(c).size(), 4u);
}

TEST(Config, ReadsEveryVariable) {
  ServiceConfig c = LoadConfig(FakeEnv({{"LLM_ENDPOINT", "https://x/v1"},
                                        {"LLM_API_KEY", "k"},
                                        {"LLM_MODEL_FRONTIER", "f"},
                                        {"LLM_MODEL_FAST", "q"},
                                        {"LLM_TEMPERATURE", "0.5"},
                                        {"SBAC_STORE_DIR", "/tmp/s"},
                                        {"SBAC_VIGNETTE_K", "4"}}));
  EXPECT_EQ(c.llm.endpoint, "https://x/v1");
  EXPECT_EQ(c.llm.fast_model, "q");
  EXPECT_EQ(c.llm.temperature, 0.5);
  EXPECT_EQ(c.store_dir, "/tmp/s");
  EXPECT_EQ(c.vignette_k, 4);
  EXPECT_TRUE(MissingLiveSettings(c).empty());
}

TEST(Config, RejectsBadNumbers) {
  for (auto [name, value] : std::vector<std::pair<std::string, std::string>>{
           {"LLM_TEMPERATURE", "warm"},
           {"SBAC_VIGNETTE_K", "0"},
           {"SBAC_VIGNETTE_K", "3x"}}) {
    try {
      LoadConfig(FakeEnv({{name, value}}));
      ADD_FAILURE() << name << "=" << value;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  }
}

}  // namespace
}  // namespace sbac
