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

#include "sbac/analyze_engine.h"

#include "sbac/engine_support.h"
#include "sbac/errors.h"
#include "sbac/prompts.h"

namespace sbac {
namespace {

std::string RelationshipLines(const IdentificationResult& id) {
  std::string out;
  for (const Relationship& r : id.relationships) {
    out += MarkRef(r.from_mark) + " -> " + MarkRef(r.to_mark);
    if (r.label && !r.label->empty()) out += " \"" + *r.label + "\"";
    out += '\n';
  }
  return out;
}

std::string HistoryLines(const SessionState& session) {
  std::string out;
  for (const ClarificationTurn& t : session.clarification_history) {
    out += "- On " + t.insight_id + " (" + std::string(ToString(t.intent)) +
           ") the user said: \"" + t.user_message + "\". Reply: \"" +
           t.response + "\". Result: " + t.outcome + "\n";
  }
  return out;
}

}  // namespace

std::string ScenarioText(const SessionState& session) {
  if (session.scenario_context.empty()) {
    return "Scenario context: none was provided.";
  }
  return "Scenario context: " + session.scenario_context;
}

AnalysisContext BuildAnalysisContext(const SessionState& session) {
  if (session.stage != Stage::kAnalyze) {
    Fail(ErrorCode::kStageError, "analysis needs the analyze stage, session is in " +
                                     std::string(ToString(session.stage)));
  }
  if (!session.identification || session.entities.empty()) {
    Fail(ErrorCode::kStageError, "nothing has been identified on the canvas");
  }
  AnalysisContext ctx;
  ctx.system_prompt = RenderPrompt(PromptId::kCiAnalysis,
                                   {{"SCENARIO_CONTEXT", ScenarioText(session)}});

  std::string text;
  text += "## Canvas Element Map\n" + EntityMapText(session);
  std::string rels = RelationshipLines(*session.identification);
  if (!rels.empty()) text += "\n## Connections\n" + rels;
  text += "\n## Current Policies\n" + PoliciesText(session.policies) + "\n";
  text += "\n## Current Insights\n" +
          InsightsText(session.insights.LiveCards()) + "\n";
  std::vector<std::string> dismissed = session.insights.DismissedIds();
  if (!dismissed.empty()) {
    text += "\n## Dismissed by user (do not re-raise)\n";
    for (const std::string& id : dismissed) text += "- " + id + "\n";
  }
  std::string history = HistoryLines(session);
  if (!history.empty()) text += "\n## Clarification History\n" + history;
  ctx.user_text = std::move(text);
  return ctx;
}

AnalyzeResponse ParseAnalysisFor(const SessionState& session,
                                 std::string_view raw) {
  AnalyzeResponse response = ParseAnalyzeResponse(raw);
  std::set<int> marks = KnownMarks(session);
  RequireValid(ValidatePolicySet(response.policies, marks), "policies");
  std::set<std::string> numbers = PolicyNumbers(response.policies);
  for (std::size_t i = 0; i < response.insights.size(); ++i) {
    ValidationReport report =
        ValidateInsight(response.insights[i], numbers, marks);
    for (Violation& v : report) v.path = IndexPath("insights", i) + "." + v.path;
    RequireValid(report, "insights");
  }
  InsightLedger trial = session.insights;
  try {
    trial.Merge(response.insights);
  } catch (const Error& e) {
    throw SchemaError("$.insights", e.what());
  }
  return response;
}

AnalyzeResponse RunAnalysis(SessionState& session, const Gateway& gateway,
                            const std::string& som_png) {
  AnalysisContext ctx = BuildAnalysisContext(session);
  ChatRequest request;
  request.kind = CallKind::kCiAnalysis;
  request.system_prompt = std::move(ctx.system_prompt);
  request.user_turns.push_back(TextPart{std::move(ctx.user_text)});
  if (!som_png.empty()) {
    request.user_turns.push_back(ImagePart{som_png, ImagePurpose::kSom});
  }
  request.schema_id = std::string(ToString(SchemaId::kAnalysis));

  AskOutcome outcome;
  std::optional<AnalyzeResponse> parsed = AskValidated(
      gateway, session, std::move(request),
      [&](const std::string& raw) { return ParseAnalysisFor(session, raw); },
      /*reasks=*/1, &outcome);
  if (!parsed) {
    session.analysis_status = "unavailable";
    session.status_note = "analysis unavailable: " + outcome.last_violation;
    session.audit_log.push_back({"analysis_unavailable", outcome.last_violation});
    Fail(ErrorCode::kAnalysisUnavailable, outcome.last_violation);
  }

  session.policies = parsed->policies;
  session.insights.Merge(parsed->insights);
  session.insights.RefreshDangling(KnownMarks(session));
  if (parsed->generate) {
    SketchProposal proposal;
    proposal.source = "analysis";
    proposal.directive = *parsed->generate;
    session.pending_sketch_proposal = std::move(proposal);
  }
  session.last_next_action = parsed->next_action;
  session.last_chat = parsed->chat;
  session.analysis_status = "ok";
  session.status_note.clear();
  session.audit_log.push_back(
      {"analysis", std::to_string(parsed->policies.size()) + " policies, " +
                       std::to_string(parsed->insights.size()) + " insights"});
  return *std::move(parsed);
}

void SetInsightState(SessionState& session, std::string_view id,
                     InsightAction action) {
  InsightLedger* ledger = nullptr;
  if (session.insights.Contains(id)) {
    ledger = &session.insights;
  } else if (session.vignettes.Contains(id)) {
    ledger = &session.vignettes;
  } else {
    Fail(ErrorCode::kUnknownInsight, "unknown insight " + std::string(id));
  }
  if (action == InsightAction::kAccept) {
    ledger->Accept(id);
    session.audit_log.push_back({"accept", std::string(id)});
  } else {
    ledger->Dismiss(id, "dismissed by user");
    session.audit_log.push_back({"dismiss", std::string(id)});
  }
}

}  // namespace sbac
