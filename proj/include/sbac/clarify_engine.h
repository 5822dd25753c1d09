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

#ifndef SBAC_CLARIFY_ENGINE_H_
#define SBAC_CLARIFY_ENGINE_H_

#include <optional>
#include <string>
#include <string_view>

#include "sbac/llm_gateway.h"
#include "sbac/responses.h"
#include "sbac/session_state.h"

namespace sbac {

enum class Route { kTerminal, kDeepFix, kDeepExplore };

std::string_view ToString(Route route);

// understand/correct end the turn; fix and unclassified take the fix path;
// explore takes the explore path.
Route RouteFor(const ClassificationResult& result);

// The live (not dismissed) card with this id, from either ledger.
// Throws Error(kUnknownInsight).
const InsightCard& FindCard(const SessionState& session, std::string_view id);

// Fast-tier call. Replies that fail the schema, including unknown intents,
// come back as kUnclassified. Transport failures propagate.
ClassificationResult ClassifyIntent(const InsightCard& card,
                                    const std::string& user_message,
                                    SessionState& session,
                                    const Gateway& gateway);

// Frontier call with one re-ask; Error(kClarifyUnavailable) afterwards.
// Fix replaces the policy set and merges insights atomically; explore only
// stores a shadow proposal.
DeepResolution ResolveDeep(const InsightCard& card,
                           const std::string& user_message, Route route,
                           SessionState& session, const Gateway& gateway);

// Runs only when resolution.generate is set. A reply that fails the schema
// (or a transport failure) drops the proposal with a status note.
// Returns true when a proposal was stored.
bool ProposeSketchSync(const DeepResolution& resolution, SessionState& session,
                       const Gateway& gateway);

struct ClarifyOutcome {
  ClassificationResult classification;
  Route route = Route::kTerminal;
  std::optional<DeepResolution> resolution;
  bool sketch_proposal = false;
  bool dismissed = false;
};

// One whole clarify turn on card `insight_id`.
ClarifyOutcome Clarify(SessionState& session, const Gateway& gateway,
                       std::string_view insight_id,
                       const std::string& user_message);

// Applies (accept) or discards the explore shadow. Throws Error(kNotFound)
// when there is none.
void ResolveShadow(SessionState& session, bool accept);

Json ToJson(const ClarifyOutcome& outcome);

}  // namespace sbac

#endif  // SBAC_CLARIFY_ENGINE_H_
