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

#include <gtest/gtest.h>

#include "sbac/crypto.h"
#include "sbac/errors.h"
#include "sbac/prompts.h"

namespace sbac {
namespace {

TEST(PromptAssets, EveryIdHasNonEmptyText) {
  for (PromptId id : kAllPromptIds) {
    EXPECT_FALSE(PromptText(id).empty()) << AssetName(id);
  }
}

TEST(PromptAssets, ManifestMatchesEmbeddedText) {
  EXPECT_TRUE(VerifyPromptManifest().empty());
  std::vector<ManifestEntry> entries = ParseManifest(internal::kPromptManifest);
  EXPECT_EQ(entries.size(), std::size(kAllPromptIds));
  for (PromptId id : kAllPromptIds) {
    std::string file = std::string(AssetName(id)) + ".txt";
    bool found = false;
    for (const ManifestEntry& e : entries) {
      if (e.file == file) {
        found = true;
        EXPECT_EQ(e.sha256, Sha256Hex(PromptText(id)));
      }
    }
    EXPECT_TRUE(found) << file;
  }
}

TEST(PromptAssets, AnalysisTemplateNeedsOnlyTheScenario) {
  EXPECT_EQ(TemplateVariables(PromptText(PromptId::kCiAnalysis)),
            (std::set<std::string>{"SCENARIO_CONTEXT"}));
  EXPECT_EQ(TemplateVariables(PromptText(PromptId::kMonolithicTest)),
            (std::set<std::string>{"SCENARIO_CONTEXT", "VIGNETTE_COUNT_MIN",
                                   "VIGNETTE_COUNT_MAX"}));
}

TEST(Template, SubstitutesOnceWithoutRescanning) {
  PromptContext ctx{{"A", "{{B}}"}, {"B", "b"}};
  EXPECT_EQ(RenderTemplate("x {{A}} y {{B}}", ctx), "x {{B}} y b");
}

TEST(Template, MissingVariableIsAnError) {
  try {
    RenderTemplate("hello {{NAME}}", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingPlaceholder);
  }
}

TEST(Template, SwitchPicksOneBranchAndDropsDirectiveLines) {
  std::string text =
      "head\n"
      "{{#switch KIND}}\n"
      "{{#case a|b}}\n"
      "first {{X}}\n"
      "{{#case c}}\n"
      "second\n"
      "{{#default}}\n"
      "other\n"
      "{{/switch}}\n"
      "tail\n";
  EXPECT_EQ(TemplateVariables(text), (std::set<std::string>{"KIND", "X"}));
  EXPECT_EQ(RenderTemplate(text, {{"KIND", "b"}, {"X", "1"}}), "head\nfirst 1\ntail\n");
  EXPECT_EQ(RenderTemplate(text, {{"KIND", "c"}}), "head\nsecond\ntail\n");
  EXPECT_EQ(RenderTemplate(text, {{"KIND", "zzz"}}), "head\nother\ntail\n");
}

TEST(Template, ClassificationPromptRendersForEveryCardType) {
  for (const char* label : {"risk", "ambiguity", "conflict", "vignette"}) {
    PromptContext ctx;
    for (const std::string& v : TemplateVariables(PromptText(PromptId::kIntentClassification))) {
      ctx[v] = "value";
    }
    ctx["CARD_LABEL"] = label;
    std::string out = RenderPrompt(PromptId::kIntentClassification, ctx);
    EXPECT_EQ(out.find("{{"), std::string::npos) << label;
  }
}

}  // namespace
}  // namespace sbac
