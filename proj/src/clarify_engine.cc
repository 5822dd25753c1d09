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

#include "sbac/clarify_engine.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

#include "sbac/engine_support.h"
#include "sbac/errors.h"
#include "sbac/prompts.h"

namespace sbac {
namespace {

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

PromptContext CardContext(const InsightCard& card, const SessionState& session) {
  PromptContext ctx;
  ctx["CARD_LABEL"] = std::string(ToString(card.type));
  ctx["STAGE_TYPE"] = std::string(ToString(session.stage));
  ctx["CARD_ID"] = card.id;
  ctx["CARD_HEADING"] = card.heading;
  ctx["CARD_DESCRIPTION"] = card.description;
  ctx["CARD_RATIONALE"] = RenderRationale(card.rationale);
  ctx["CARD_EXPECTED_OUTCOME"] =
      card.expected_outcome ? std::string(ToString(*card.expected_outcome))
                            : "N/A";
  ctx["CARD_RELEVANT_POLICIES"] =
      card.relevant_policies && !card.relevant_policies->empty()
          ? Join(*card.relevant_policies)
          : "N/A";
  ctx["CURRENT_POLICIES"] = PoliciesText(session.policies);
  return ctx;
}

std::vector<InsightCard> AllLiveCards(const SessionState& session) {
  std::vector<InsightCard> cards = session.insights.LiveCards();
  for (InsightCard& v : session.vignettes.LiveCards()) cards.push_back(std::move(v));
  return cards;
}

// Vignette cards live in their own ledger.
void MergeCards(SessionState& session, const std::vector<InsightCard>& cards) {
  std::vector<InsightCard> insights;
  std::vector<InsightCard> vignettes;
  for (const InsightCard& c : cards) {
    (c.type == IssueType::kVignette ? vignettes : insights).push_back(c);
  }
  session.insights.Merge(insights);
  session.vignettes.Merge(vignettes);
}

DeepResolution ParseResolutionFor(const SessionState& session,
                                  std::string_view raw) {
  DeepResolution r = ParseDeepResolution(raw);
  std::set<int> marks = KnownMarks(session);
  RequireValid(ValidatePolicySet(r.policies, marks), "policies");
  std::set<std::string> numbers = PolicyNumbers(r.policies);
  for (std::size_t i = 0; i < r.insights.size(); ++i) {
    ValidationReport report = ValidateInsight(r.insights[i], numbers, marks);
    for (Violation& v : report) v.path = IndexPath("insights", i) + "." + v.path;
    RequireValid(report, "insights");
  }
  SessionState trial = session;
  try {
    MergeCards(trial, r.insights);
  } catch (const Error& e) {
    throw SchemaError("$.insights", e.what());
  }
  return r;
}

std::string FormatNumber(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

std::string SketchSyncUserText(const SessionState& session,
                               const std::string& directive) {
  double min_x = 0, min_y = 0, max_x = 1200, max_y = 600;
  if (!session.sketch_snapshot.empty()) {
    min_x = min_y = 1e300;
    max_x = max_y = -1e300;
    for (const RawShape& s : session.sketch_snapshot) {
      min_x = std::min(min_x, s.bbox.x);
      min_y = std::min(min_y, s.bbox.y);
      max_x = std::max(max_x, s.bbox.x + s.bbox.width);
      max_y = std::max(max_y, s.bbox.y + s.bbox.height);
    }
    min_x -= 200;
    min_y -= 200;
    max_x += 200;
    max_y += 200;
  }
  std::string text = "The user's viewport is { x: " + FormatNumber(min_x) +
                     ", y: " + FormatNumber(min_y) +
                     ", width: " + FormatNumber(max_x - min_x) +
                     ", height: " + FormatNumber(max_y - min_y) + " }.";
  if (session.sketch_snapshot.empty()) {
    text += " The canvas is empty.";
  } else {
    text += " Existing shapes on canvas:";
    for (std::size_t i = 0; i < session.sketch_snapshot.size(); ++i) {
      const RawShape& s = session.sketch_snapshot[i];
      text += i == 0 ? " " : ", ";
      text += s.kind + " shape";
      if (s.text && !s.text->empty()) text += " \"" + *s.text + "\"";
      text += " (id: \"" + s.shape_id + "\") at (" + FormatNumber(s.bbox.x) +
              ", " + FormatNumber(s.bbox.y) + ")";
    }
    text += ".";
  }
  text += "\nUser: " + directive;
  return text;
}

}  // namespace

std::string_view ToString(Route route) {
  switch (route) {
    case Route::kTerminal: return "terminal";
    case Route::kDeepFix: return "fix";
    case Route::kDeepExplore: return "explore";
  }
  return "terminal";
}

Route RouteFor(const ClassificationResult& result) {
  switch (result.intent) {
    case Intent::kUnderstand:
    case Intent::kCorrect:
      return Route::kTerminal;
    case Intent::kExplore:
      return Route::kDeepExplore;
    case Intent::kFix:
    case Intent::kUnclassified:
      return Route::kDeepFix;
  }
  return Route::kDeepFix;
}

const InsightCard& FindCard(const SessionState& session, std::string_view id) {
  for (const InsightLedger* ledger : {&session.insights, &session.vignettes}) {
    if (const LedgerEntry* e = ledger->Find(id)) {
      if (e->lifecycle == Lifecycle::kDismissed) {
        Fail(ErrorCode::kUnknownInsight,
             "insight " + std::string(id) + " was dismissed");
      }
      return e->card;
    }
  }
  Fail(ErrorCode::kUnknownInsight, "unknown insight " + std::string(id));
}

ClassificationResult ClassifyIntent(const InsightCard& card,
                                    const std::string& user_message,
                                    SessionState& session,
                                    const Gateway& gateway) {
  ChatRequest request;
  request.kind = CallKind::kIntentClassification;
  request.system_prompt =
      RenderPrompt(PromptId::kIntentClassification, CardContext(card, session));
  request.user_turns.push_back(TextPart{user_message});
  request.schema_id = std::string(ToString(SchemaId::kClassification));
  std::string reply =
      gateway.Invoke(request, session.session_id, session.call_log);
  try {
    return ParseClassification(reply);
  } catch (const SchemaError& e) {
    spdlog::info("classification reply rejected ({}); treating as unclassified",
                 e.what());
    return ClassificationResult{Intent::kUnclassified, "", false};
  }
}

DeepResolution ResolveDeep(const InsightCard& card,
                           const std::string& user_message, Route route,
                           SessionState& session, const Gateway& gateway) {
  if (route == Route::kTerminal) {
    Fail(ErrorCode::kInvalidArgument, "deep resolution needs fix or explore");
  }
  PromptContext ctx = CardContext(card, session);
  ctx["INTENT"] = route == Route::kDeepExplore ? "explore" : "fix";
  ctx["ALL_INSIGHTS"] = InsightsText(AllLiveCards(session));
  std::string map = EntityMapText(session);
  ctx["CANVAS_ELEMENT_MAP"] = map.empty() ? "(no identified elements)" : map;

  ChatRequest request;
  request.kind = CallKind::kDeepResolution;
  request.system_prompt = RenderPrompt(PromptId::kDeepResolution, ctx);
  request.user_turns.push_back(TextPart{user_message});
  request.schema_id = std::string(ToString(SchemaId::kDeepResolution));

  AskOutcome outcome;
  std::optional<DeepResolution> parsed = AskValidated(
      gateway, session, std::move(request),
      [&](const std::string& raw) { return ParseResolutionFor(session, raw); },
      /*reasks=*/1, &outcome);
  if (!parsed) {
    session.status_note = "clarify unavailable: " + outcome.last_violation;
    Fail(ErrorCode::kClarifyUnavailable, outcome.last_violation);
  }

  if (route == Route::kDeepExplore) {
    session.shadow = ShadowProposal{card.id, parsed->chat, parsed->policies,
                                    parsed->insights};
    session.audit_log.push_back({"explore", "shadow proposal for " + card.id});
    return *std::move(parsed);
  }

  session.policies = parsed->policies;
  MergeCards(session, parsed->insights);
  bool kept = std::any_of(parsed->insights.begin(), parsed->insights.end(),
                          [&](const InsightCard& c) { return c.id == card.id; });
  if (!kept) {
    InsightLedger& ledger =
        card.type == IssueType::kVignette ? session.vignettes : session.insights;
    ledger.Dismiss(card.id, "resolved by fix");
  }
  session.insights.RefreshDangling(KnownMarks(session));
  session.vignettes.RefreshDangling(KnownMarks(session));
  session.audit_log.push_back(
      {"fix", card.id + ": " + std::to_string(parsed->policies.size()) +
                  " policies" + (kept ? "" : ", card resolved")});
  return *std::move(parsed);
}

bool ProposeSketchSync(const DeepResolution& resolution, SessionState& session,
                       const Gateway& gateway) {
  if (!resolution.generate) return false;
  ChatRequest request;
  request.kind = CallKind::kSketchSync;
  request.system_prompt = std::string(PromptText(PromptId::kSketchSync));
  request.user_turns.push_back(
      TextPart{SketchSyncUserText(session, *resolution.generate)});
  request.schema_id = std::string(ToString(SchemaId::kSketchSync));
  try {
    std::string reply =
        gateway.Invoke(request, session.session_id, session.call_log);
    SketchSyncResponse sync = ParseSketchSync(reply);
    SketchProposal proposal;
    proposal.source = "clarify";
    proposal.directive = *resolution.generate;
    proposal.proposed_actions = resolution.proposed_actions;
    proposal.strategy = sync.strategy;
    proposal.events = sync.events;
    session.pending_sketch_proposal = std::move(proposal);
    return true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSchemaError && !IsTransportFailure(e.code())) {
      throw;
    }
    session.status_note = std::string("sketch sync dropped: ") + e.what();
    session.audit_log.push_back({"sketch_sync_dropped", e.what()});
    return false;
  }
}

ClarifyOutcome Clarify(SessionState& session, const Gateway& gateway,
                       std::string_view insight_id,
                       const std::string& user_message) {
  if (session.stage == Stage::kSpecify) {
    Fail(ErrorCode::kStageError, "nothing to clarify before analysis");
  }
  InsightCard card = FindCard(session, insight_id);
  ClarifyOutcome outcome;
  outcome.classification = ClassifyIntent(card, user_message, session, gateway);
  outcome.route = RouteFor(outcome.classification);

  ClarificationTurn turn{card.id, user_message, outcome.classification.intent,
                         outcome.classification.response, ""};
  if (outcome.route == Route::kTerminal) {
    if (outcome.classification.intent == Intent::kCorrect &&
        outcome.classification.dismiss_insight) {
      InsightLedger& ledger = card.type == IssueType::kVignette
                                  ? session.vignettes
                                  : session.insights;
      ledger.Dismiss(card.id, "dismissed by user");
      outcome.dismissed = true;
      turn.outcome = "dismissed";
    } else {
      turn.outcome = "answered";
    }
    session.clarification_history.push_back(std::move(turn));
    return outcome;
  }

  try {
    outcome.resolution =
        ResolveDeep(card, user_message, outcome.route, session, gateway);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kClarifyUnavailable) {
      turn.outcome = "clarify unavailable";
      session.clarification_history.push_back(std::move(turn));
    }
    throw;
  }
  turn.response = outcome.resolution->chat;
  turn.outcome = outcome.route == Route::kDeepExplore
                     ? "alternative proposed"
                     : "policies updated";
  session.clarification_history.push_back(std::move(turn));
  outcome.sketch_proposal =
      ProposeSketchSync(*outcome.resolution, session, gateway);
  return outcome;
}

void ResolveShadow(SessionState& session, bool accept) {
  if (!session.shadow) Fail(ErrorCode::kNotFound, "no explore proposal pending");
  if (accept) {
    session.policies = session.shadow->policies;
    MergeCards(session, session.shadow->insights);
    session.insights.RefreshDangling(KnownMarks(session));
    session.audit_log.push_back({"shadow_applied", session.shadow->insight_id});
  } else {
    session.audit_log.push_back({"shadow_discarded", session.shadow->insight_id});
  }
  session.shadow.reset();
}

Json ToJson(const ClarifyOutcome& outcome) {
  Json out = Json{{"classification", ToJson(outcome.classification)},
                  {"route", ToString(outcome.route)}};
  out["resolution"] = outcome.resolution ? ToJson(*outcome.resolution) : Json();
  out["sketchProposal"] = outcome.sketch_proposal;
  out["dismissed"] = outcome.dismissed;
  return out;
}

}  // namespace sbac
