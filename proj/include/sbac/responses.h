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

#ifndef SBAC_RESPONSES_H_
#define SBAC_RESPONSES_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbac/json_util.h"
#include "sbac/mark_model.h"
#include "sbac/policy_model.h"
#include "sbac/vignette_types.h"

namespace sbac {

// Identifies the expected shape of a structured model reply.
enum class SchemaId {
  kIdentification,
  kAnalysis,
  kClassification,
  kDeepResolution,
  kSketchSync,
  kPolicyRipple,
  kInsightRipple,
  kDecomposition,
  kRealization,
  kFallbackVignettes,
};

std::string_view ToString(SchemaId id);
std::optional<SchemaId> SchemaIdFromString(std::string_view s);

// Removes a surrounding ``` or ```json fence if present; otherwise returns
// the trimmed input.
std::string StripCodeFence(std::string_view raw);

enum class NextAction { kContinue, kTest };
std::string_view ToString(NextAction action);

struct AnalyzeResponse {
  std::string chat;
  std::optional<std::string> generate;
  std::vector<Policy> policies;
  std::vector<InsightCard> insights;
  NextAction next_action = NextAction::kContinue;
};

enum class Intent { kUnderstand, kCorrect, kFix, kExplore, kUnclassified };
std::string_view ToString(Intent intent);
std::optional<Intent> IntentFromString(std::string_view s);

struct ClassificationResult {
  Intent intent = Intent::kUnclassified;
  std::string response;
  bool dismiss_insight = false;  // only ever true for kCorrect
};

struct DeepResolution {
  std::string chat;
  std::vector<Policy> policies;
  std::vector<InsightCard> insights;
  std::optional<std::string> generate;
  std::vector<std::string> proposed_actions;
};

struct SketchSyncResponse {
  std::string strategy;
  Json events = Json::array();  // validated event objects, model order
};

struct PolicyRippleResponse {
  bool has_ripple = false;
  std::string summary;
  std::vector<Policy> policies;
};

struct InsightRippleResponse {
  bool has_changes = false;
  std::string summary;
  std::vector<InsightCard> insights;
};

struct DecompositionResponse {
  std::vector<PolicySchema> schemas;
};

struct RealizationResponse {
  std::vector<InsightCard> vignettes;
};

// Each parser strips code fences, parses, and validates the whole document.
// Any violation throws SchemaError; nothing partial is ever returned.
IdentificationResult ParseIdentification(std::string_view raw);
AnalyzeResponse ParseAnalyzeResponse(std::string_view raw);
ClassificationResult ParseClassification(std::string_view raw);
DeepResolution ParseDeepResolution(std::string_view raw);
SketchSyncResponse ParseSketchSync(std::string_view raw);
PolicyRippleResponse ParsePolicyRipple(std::string_view raw);
InsightRippleResponse ParseInsightRipple(std::string_view raw);
DecompositionResponse ParseDecomposition(std::string_view raw);
RealizationResponse ParseRealization(std::string_view raw);

// Validates `raw` against `schema` and returns the parsed document.
Json ParseStructured(std::string_view raw, SchemaId schema);

Json ToJson(const AnalyzeResponse& response);
Json ToJson(const ClassificationResult& result);
Json ToJson(const DeepResolution& resolution);
Json ToJson(const SketchSyncResponse& response);

}  // namespace sbac

#endif  // SBAC_RESPONSES_H_
