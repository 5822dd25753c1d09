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

#ifndef SBAC_PROMPTS_H_
#define SBAC_PROMPTS_H_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sbac {

namespace internal {

struct EmbeddedPrompt {
  const char* name;
  const char* text;
};

// Defined in the generated prompt_assets.cc.
extern const EmbeddedPrompt kEmbeddedPrompts[];
extern const std::size_t kEmbeddedPromptCount;
extern const char kPromptManifest[];

}  // namespace internal

enum class PromptId {
  kMarkIdentification,
  kCiAnalysis,
  kIntentClassification,
  kDeepResolution,
  kSketchSync,
  kPolicyPropagation,
  kInsightPropagation,
  kFactorDecomposition,
  kStoryRealization,
  kMonolithicTest,
};

inline constexpr PromptId kAllPromptIds[] = {
    PromptId::kMarkIdentification, PromptId::kCiAnalysis,
    PromptId::kIntentClassification, PromptId::kDeepResolution,
    PromptId::kSketchSync, PromptId::kPolicyPropagation,
    PromptId::kInsightPropagation, PromptId::kFactorDecomposition,
    PromptId::kStoryRealization, PromptId::kMonolithicTest};

using PromptContext = std::map<std::string, std::string, std::less<>>;

// Asset file stem, e.g. "ci_analysis".
std::string_view AssetName(PromptId id);
// Unrendered template text. Throws Error(kNotFound) if the asset is missing.
std::string_view PromptText(PromptId id);

// Names of every variable the template reads, switch selectors included.
std::set<std::string> TemplateVariables(std::string_view text);

// Substitutes {{NAME}} tokens in one pass and resolves
// {{#switch NAME}} / {{#case a|b}} / {{#default}} / {{/switch}} blocks.
// Directive lines are dropped from the output. Substituted values are not
// re-scanned. Throws Error(kMissingPlaceholder) for any unbound variable.
std::string RenderTemplate(std::string_view text, const PromptContext& context);

std::string RenderPrompt(PromptId id, const PromptContext& context);

struct ManifestEntry {
  std::string sha256;
  std::string file;
};

std::vector<ManifestEntry> ParseManifest(std::string_view manifest);

// Recomputes every embedded asset digest and compares it with the shipped
// manifest. Returns one message per mismatch; empty means no drift.
std::vector<std::string> VerifyPromptManifest();

}  // namespace sbac

#endif  // SBAC_PROMPTS_H_
