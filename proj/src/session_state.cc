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

#include "sbac/session_state.h"

#include <array>

#include "sbac/errors.h"

namespace sbac {
namespace {

constexpr std::array<GuidanceCard, 4> kGuidance = {{
    {"What", "What resource(s) do you want to protect?"},
    {"Who", "Who needs to interact with your resources?"},
    {"Action", "What actions should each person be able to perform?"},
    {"When", "When or under what conditions should these actions be allowed?"},
}};

Json OptionalJson(const std::optional<std::string>& value) {
  return value ? Json(*value) : Json();
}

SketchProposal SketchProposalFromJson(const Json& value,
                                      const std::string& path) {
  ObjectReader r(value, path);
  SketchProposal p;
  p.source = r.RequiredString("source");
  p.directive = r.RequiredString("directive");
  p.proposed_actions = r.RequiredStringArray("proposedActions");
  p.strategy = r.RequiredString("strategy");
  p.events = r.RequiredArray("events");
  r.Finish(UnknownFields::kReject);
  return p;
}

ShadowProposal ShadowFromJson(const Json& value, const std::string& path) {
  ObjectReader r(value, path);
  ShadowProposal s;
  s.insight_id = r.RequiredString("insightId");
  s.chat = r.RequiredString("chat");
  s.policies = PoliciesFromJson(r.Required("policies"), r.PathOf("policies"),
                                UnknownFields::kPreserve);
  s.insights = InsightsFromJson(r.Required("insights"), r.PathOf("insights"),
                                UnknownFields::kPreserve);
  r.Finish(UnknownFields::kReject);
  return s;
}

}  // namespace

std::string_view ToString(Stage stage) {
  switch (stage) {
    case Stage::kSpecify: return "specify";
    case Stage::kAnalyze: return "analyze";
    case Stage::kTest: return "test";
  }
  return "specify";
}

std::optional<Stage> StageFromString(std::string_view s) {
  if (s == "specify") return Stage::kSpecify;
  if (s == "analyze") return Stage::kAnalyze;
  if (s == "test") return Stage::kTest;
  return std::nullopt;
}

bool IsLegalTransition(Stage from, Stage to) {
  return (from == Stage::kSpecify && to == Stage::kAnalyze) ||
         (from == Stage::kAnalyze && to == Stage::kTest) ||
         (from == Stage::kTest && to == Stage::kAnalyze);
}

std::span<const GuidanceCard> GuidanceDeck() { return kGuidance; }

SessionState NewSession(std::string session_id, std::string scenario_context) {
  SessionState s;
  s.session_id = std::move(session_id);
  s.scenario_context = std::move(scenario_context);
  return s;
}

Json ToJson(const SketchProposal& proposal) {
  return Json{{"source", proposal.source},
              {"directive", proposal.directive},
              {"proposedActions", proposal.proposed_actions},
              {"strategy", proposal.strategy},
              {"events", proposal.events}};
}

Json ToJson(const ShadowProposal& shadow) {
  return Json{{"insightId", shadow.insight_id},
              {"chat", shadow.chat},
              {"policies", PoliciesToJson(shadow.policies)},
              {"insights", InsightsToJson(shadow.insights)}};
}

Json ToJson(const SessionState& s) {
  Json sketch = Json::array();
  for (const RawShape& shape : s.sketch_snapshot) sketch.push_back(ToJson(shape));
  Json marks = Json::array();
  for (const NumberedMark& m : s.mark_map) marks.push_back(ToJson(m));
  Json entities = Json::array();
  for (const Entity& e : s.entities) entities.push_back(ToJson(e));
  Json history = Json::array();
  for (const ClarificationTurn& t : s.clarification_history) {
    history.push_back(Json{{"insightId", t.insight_id},
                           {"userMessage", t.user_message},
                           {"intent", ToString(t.intent)},
                           {"response", t.response},
                           {"outcome", t.outcome}});
  }
  Json audit = Json::array();
  for (const AuditEntry& a : s.audit_log) {
    audit.push_back(Json{{"event", a.event}, {"detail", a.detail}});
  }
  Json journal = Json::array();
  for (const JournalEntry& j : s.journal) {
    journal.push_back(
        Json{{"op", j.op}, {"args", j.args}, {"error", OptionalJson(j.error)}});
  }

  Json out;
  out["sessionId"] = s.session_id;
  out["stage"] = ToString(s.stage);
  out["scenarioContext"] = s.scenario_context;
  out["sketchSnapshot"] = std::move(sketch);
  out["markMap"] = std::move(marks);
  out["identification"] =
      s.identification ? ToJson(*s.identification) : Json();
  out["entities"] = std::move(entities);
  out["policies"] = PoliciesToJson(s.policies);
  out["insightLedger"] = s.insights.ToJson();
  out["vignettes"] = s.vignettes.ToJson();
  out["shadowPolicies"] = s.shadow ? ToJson(*s.shadow) : Json();
  out["pendingSketchProposal"] =
      s.pending_sketch_proposal ? ToJson(*s.pending_sketch_proposal) : Json();
  out["clarificationHistory"] = std::move(history);
  out["callLog"] = CallLogToJson(s.call_log);
  out["sketchStale"] = s.sketch_stale;
  out["analysisStatus"] = s.analysis_status;
  out["lastNextAction"] =
      s.last_next_action ? Json(ToString(*s.last_next_action)) : Json();
  out["lastChat"] = s.last_chat;
  out["statusNote"] = s.status_note;
  out["vignetteCounter"] = s.vignette_counter;
  out["auditLog"] = std::move(audit);
  out["testDiagnostics"] = s.test_diagnostics;
  out["journal"] = std::move(journal);
  return out;
}

SessionState SessionStateFromJson(const Json& value) {
  constexpr UnknownFields kKeep = UnknownFields::kPreserve;
  ObjectReader r(value, "$");
  SessionState s;
  s.session_id = r.RequiredNonEmptyString("sessionId");
  std::string stage = r.RequiredString("stage");
  auto parsed_stage = StageFromString(stage);
  if (!parsed_stage) throw SchemaError(r.PathOf("stage"), "unknown stage");
  s.stage = *parsed_stage;
  s.scenario_context = r.RequiredString("scenarioContext");
  s.sketch_snapshot =
      RawShapesFromJson(r.Required("sketchSnapshot"), r.PathOf("sketchSnapshot"));
  const Json& marks = r.RequiredArray("markMap");
  for (std::size_t i = 0; i < marks.size(); ++i) {
    s.mark_map.push_back(
        NumberedMarkFromJson(marks[i], IndexPath(r.PathOf("markMap"), i)));
  }
  if (const Json* id = r.Optional("identification")) {
    s.identification =
        IdentificationFromJson(*id, r.PathOf("identification"), kKeep);
  }
  const Json& entities = r.RequiredArray("entities");
  for (std::size_t i = 0; i < entities.size(); ++i) {
    s.entities.push_back(
        EntityFromJson(entities[i], IndexPath(r.PathOf("entities"), i)));
  }
  s.policies =
      PoliciesFromJson(r.Required("policies"), r.PathOf("policies"), kKeep);
  s.insights = InsightLedger::FromJson(r.Required("insightLedger"),
                                       r.PathOf("insightLedger"));
  s.vignettes =
      InsightLedger::FromJson(r.Required("vignettes"), r.PathOf("vignettes"));
  if (const Json* shadow = r.Optional("shadowPolicies")) {
    s.shadow = ShadowFromJson(*shadow, r.PathOf("shadowPolicies"));
  }
  if (const Json* p = r.Optional("pendingSketchProposal")) {
    s.pending_sketch_proposal =
        SketchProposalFromJson(*p, r.PathOf("pendingSketchProposal"));
  }
  const Json& history = r.RequiredArray("clarificationHistory");
  for (std::size_t i = 0; i < history.size(); ++i) {
    ObjectReader t(history[i], IndexPath(r.PathOf("clarificationHistory"), i));
    ClarificationTurn turn;
    turn.insight_id = t.RequiredString("insightId");
    turn.user_message = t.RequiredString("userMessage");
    auto intent = IntentFromString(t.RequiredString("intent"));
    if (!intent) throw SchemaError(t.PathOf("intent"), "unknown intent");
    turn.intent = *intent;
    turn.response = t.RequiredString("response");
    turn.outcome = t.RequiredString("outcome");
    t.Finish(UnknownFields::kReject);
    s.clarification_history.push_back(std::move(turn));
  }
  s.call_log = CallLogFromJson(r.Required("callLog"), r.PathOf("callLog"));
  s.sketch_stale = r.RequiredBool("sketchStale");
  s.analysis_status = r.RequiredString("analysisStatus");
  if (auto next = r.OptionalString("lastNextAction")) {
    if (*next == "test") {
      s.last_next_action = NextAction::kTest;
    } else if (*next == "continue") {
      s.last_next_action = NextAction::kContinue;
    } else {
      throw SchemaError(r.PathOf("lastNextAction"), "unknown next action");
    }
  }
  s.last_chat = r.RequiredString("lastChat");
  s.status_note = r.RequiredString("statusNote");
  s.vignette_counter = static_cast<int>(r.RequiredInt("vignetteCounter"));
  const Json& audit = r.RequiredArray("auditLog");
  for (std::size_t i = 0; i < audit.size(); ++i) {
    ObjectReader a(audit[i], IndexPath(r.PathOf("auditLog"), i));
    AuditEntry entry{a.RequiredString("event"), a.RequiredString("detail")};
    a.Finish(UnknownFields::kReject);
    s.audit_log.push_back(std::move(entry));
  }
  if (r.Has("testDiagnostics")) s.test_diagnostics = r.Required("testDiagnostics");
  const Json& journal = r.RequiredArray("journal");
  for (std::size_t i = 0; i < journal.size(); ++i) {
    ObjectReader j(journal[i], IndexPath(r.PathOf("journal"), i));
    JournalEntry entry;
    entry.op = j.RequiredNonEmptyString("op");
    entry.args = j.Required("args");
    entry.error = j.OptionalString("error");
    j.Finish(UnknownFields::kReject);
    s.journal.push_back(std::move(entry));
  }
  r.Finish(UnknownFields::kReject);
  return s;
}

std::vector<std::string> CheckCallStructure(const CallLog& log) {
  std::vector<std::string> problems;
  bool identified = false;
  bool first_identification = false;
  for (std::size_t i = 0; i < log.size(); ++i) {
    CallKind kind = log[i].kind;
    std::optional<CallKind> prev =
        i == 0 ? std::nullopt : std::optional<CallKind>(log[i - 1].kind);
    auto complain = [&](const std::string& what) {
      problems.push_back("call " + std::to_string(i) + " (" +
                         std::string(ToString(kind)) + "): " + what);
    };
    if (log[i].tier != TierFor(kind)) complain("wrong tier");
    switch (kind) {
      case CallKind::kMarkIdentification:
        first_identification = true;
        identified = true;
        break;
      case CallKind::kReidentification:
        if (!first_identification) complain("no earlier identification");
        identified = true;
        break;
      case CallKind::kCiAnalysis:
      case CallKind::kFactorDecomposition:
        if (!identified) complain("no identification before it");
        break;
      case CallKind::kDeepResolution:
        if (prev != CallKind::kIntentClassification &&
            prev != CallKind::kDeepResolution) {
          complain("not preceded by intent classification");
        }
        break;
      case CallKind::kSketchSync:
        if (prev != CallKind::kDeepResolution) {
          complain("not preceded by deep resolution");
        }
        break;
      case CallKind::kInsightPropagation:
        if (prev != CallKind::kPolicyPropagation) {
          complain("not preceded by policy propagation");
        }
        break;
      case CallKind::kStoryRealization:
        if (prev != CallKind::kFactorDecomposition &&
            prev != CallKind::kStoryRealization) {
          complain("not preceded by factor decomposition");
        }
        break;
      case CallKind::kIntentClassification:
      case CallKind::kPolicyPropagation:
        break;
    }
  }
  return problems;
}

CallBudget ComputeCallBudget(const CallLog& log) {
  CallBudget budget;
  budget.count = log.size();
  for (CallKind kind : kAllCallKinds) {
    std::size_t n = 0;
    for (const CallRecord& rec : log) n += rec.kind == kind ? 1 : 0;
    budget.by_kind.emplace_back(kind, n);
  }
  return budget;
}

Json ToJson(const CallBudget& budget) {
  Json by_kind = Json::object();
  for (const auto& [kind, n] : budget.by_kind) by_kind[ToString(kind)] = n;
  return Json{{"count", budget.count}, {"byKind", std::move(by_kind)}};
}

}  // namespace sbac
