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

#ifndef SBAC_SESSION_STATE_H_
#define SBAC_SESSION_STATE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbac/insight_ledger.h"
#include "sbac/json_util.h"
#include "sbac/llm_gateway.h"
#include "sbac/mark_model.h"
#include "sbac/policy_model.h"
#include "sbac/responses.h"

namespace sbac {

enum class Stage { kSpecify, kAnalyze, kTest };

std::string_view ToString(Stage stage);
std::optional<Stage> StageFromString(std::string_view s);

// specify->analyze, analyze->test, test->analyze.
bool IsLegalTransition(Stage from, Stage to);

struct GuidanceCard {
  std::string_view heading;
  std::string_view prompt;
};

// The four fixed prompts shown before anything is drawn.
std::span<const GuidanceCard> GuidanceDeck();

struct ClarificationTurn {
  std::string insight_id;
  std::string user_message;
  Intent intent = Intent::kUnclassified;
  std::string response;
  std::string outcome;  // what the turn did, e.g. "policies updated"

  bool operator==(const ClarificationTurn&) const = default;
};

// A canvas change offered to the user. Analysis proposals carry only the
// directive; clarify proposals also carry rendered events.
struct SketchProposal {
  std::string source;  // "analysis" | "clarify"
  std::string directive;
  std::vector<std::string> proposed_actions;
  std::string strategy;
  Json events = Json::array();

  bool operator==(const SketchProposal&) const = default;
};

// Explore result kept aside until the user confirms it.
struct ShadowProposal {
  std::string insight_id;
  std::string chat;
  std::vector<Policy> policies;
  std::vector<InsightCard> insights;

  bool operator==(const ShadowProposal&) const = default;
};

struct AuditEntry {
  std::string event;
  std::string detail;

  bool operator==(const AuditEntry&) const = default;
};

// One mutating request, kept so that an exported session can be re-driven.
struct JournalEntry {
  std::string op;
  Json args = Json::object();
  std::optional<std::string> error;  // error code name if the op failed

  bool operator==(const JournalEntry&) const = default;
};

struct SessionState {
  std::string session_id;
  Stage stage = Stage::kSpecify;
  std::string scenario_context;
  std::vector<RawShape> sketch_snapshot;
  std::vector<NumberedMark> mark_map;
  std::optional<IdentificationResult> identification;
  std::vector<Entity> entities;
  std::vector<Policy> policies;
  InsightLedger insights;
  InsightLedger vignettes;
  std::optional<ShadowProposal> shadow;
  std::optional<SketchProposal> pending_sketch_proposal;
  std::vector<ClarificationTurn> clarification_history;
  CallLog call_log;

  bool sketch_stale = false;
  std::string analysis_status = "none";  // none | ok | unavailable
  std::optional<NextAction> last_next_action;
  std::string last_chat;
  std::string status_note;
  int vignette_counter = 0;
  std::vector<AuditEntry> audit_log;
  Json test_diagnostics;  // null until a test run happened
  std::vector<JournalEntry> journal;

  bool operator==(const SessionState&) const = default;
};

SessionState NewSession(std::string session_id, std::string scenario_context);

Json ToJson(const SessionState& state);
SessionState SessionStateFromJson(const Json& value);

Json ToJson(const SketchProposal& proposal);
Json ToJson(const ShadowProposal& shadow);

// Checks the call log against the ordering rules of a session: propagation
// of insights only right after policy propagation, sketch sync only right
// after deep resolution, deep resolution only after a classification, and
// identification before analysis. Returns one message per breach.
std::vector<std::string> CheckCallStructure(const CallLog& log);

struct CallBudget {
  std::size_t count = 0;
  std::vector<std::pair<CallKind, std::size_t>> by_kind;  // all ten kinds
};

CallBudget ComputeCallBudget(const CallLog& log);
Json ToJson(const CallBudget& budget);

}  // namespace sbac

#endif  // SBAC_SESSION_STATE_H_
