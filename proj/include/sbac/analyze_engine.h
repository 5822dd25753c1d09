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

#ifndef SBAC_ANALYZE_ENGINE_H_
#define SBAC_ANALYZE_ENGINE_H_

#include <string>
#include <string_view>

#include "sbac/llm_gateway.h"
#include "sbac/responses.h"
#include "sbac/session_state.h"

namespace sbac {

struct AnalysisContext {
  std::string system_prompt;
  std::string user_text;
};

// Scenario text for prompt templates; never empty.
std::string ScenarioText(const SessionState& session);

// Throws Error(kStageError) outside the analyze stage or without an
// identified, non-empty canvas.
AnalysisContext BuildAnalysisContext(const SessionState& session);

// Parses and validates one analysis reply against the session. Throws
// SchemaError on any violation.
AnalyzeResponse ParseAnalysisFor(const SessionState& session,
                                 std::string_view raw);

// Runs the analysis call with one re-ask. On success policies are replaced
// and insights merged. On a second rejection the session keeps its prior
// policies and insights, analysisStatus becomes "unavailable", and
// Error(kAnalysisUnavailable) is thrown.
AnalyzeResponse RunAnalysis(SessionState& session, const Gateway& gateway,
                            const std::string& som_png);

enum class InsightAction { kAccept, kDismiss };

// Applies to insight and vignette cards alike. Throws Error(kUnknownInsight).
void SetInsightState(SessionState& session, std::string_view id,
                     InsightAction action);

}  // namespace sbac

#endif  // SBAC_ANALYZE_ENGINE_H_
