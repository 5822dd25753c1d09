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

#include "sbac/ripple_engine.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "sbac/engine_support.h"
#include "sbac/errors.h"
#include "sbac/prompts.h"
#include "sbac/responses.h"

namespace sbac {
namespace {

constexpr std::array<PolicyField, 6> kAllFields = {
    PolicyField::kDescription, PolicyField::kExplanation, PolicyField::kSubject,
    PolicyField::kResource,    PolicyField::kAction,      PolicyField::kContext,
};

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool IsRename(EditType type) {
  return type == EditType::kRenameSubject || type == EditType::kRenameResource;
}

std::string UpperName(EditType type) {
  std::string out(ToString(type));
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

const Policy* FindPolicy(const std::vector<Policy>& policies,
                         std::string_view number) {
  for (const Policy& p : policies) {
    if (p.policy_number == number) return &p;
  }
  return nullptr;
}

std::string RenameSummary(const PolicyEdit& edit, std::size_t changed) {
  return "Renamed '" + edit.old_value + "' to '" + edit.new_value +
         "' across " + std::to_string(changed) +
         (changed == 1 ? " policy" : " policies");
}

std::optional<std::string> FindCollision(const PolicyEdit& edit,
                                         const std::vector<Policy>& policies) {
  for (const Policy& p : policies) {
    if (p.policy_number == edit.policy_number) continue;
    const std::string& name = FieldRef(p, edit.field);
    if (name == edit.new_value) {
      return "'" + edit.new_value + "' is already the " +
             std::string(ToString(edit.field)) + " of " + p.policy_number +
             "; the two were not merged";
    }
  }
  return std::nullopt;
}

bool SameText(const Policy& a, const Policy& b) {
  for (PolicyField f : kAllFields) {
    if (FieldRef(a, f) != FieldRef(b, f)) return false;
  }
  return true;
}

std::string EditHeader(const PolicyEdit& edit) {
  return "Edit type: " + UpperName(edit.type) + "\nPolicy: " +
         edit.policy_number + "\nField: " + std::string(ToString(edit.field)) +
         "\nOld value: \"" + edit.old_value + "\"\nNew value: \"" +
         edit.new_value + "\"\n";
}

Rationale SwapRationale(Rationale r, const PolicyEdit& edit) {
  r.happening = ReplaceWholeToken(r.happening, edit.old_value, edit.new_value);
  r.expected = ReplaceWholeToken(r.expected, edit.old_value, edit.new_value);
  r.consequence =
      ReplaceWholeToken(r.consequence, edit.old_value, edit.new_value);
  return r;
}

InsightCard SwapCard(InsightCard card, const PolicyEdit& edit) {
  card.heading = ReplaceWholeToken(card.heading, edit.old_value, edit.new_value);
  card.description =
      ReplaceWholeToken(card.description, edit.old_value, edit.new_value);
  card.rationale = SwapRationale(std::move(card.rationale), edit);
  return card;
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool ModelMarkedAffected(const InsightCard& original, const InsightCard& reply) {
  if (EndsWith(reply.heading, "[Updated]")) return true;
  if (reply.description.find("[Edit:") != std::string::npos) return true;
  return original.type == IssueType::kVignette &&
         reply.expected_outcome != original.expected_outcome;
}

InsightCard MarkCard(InsightCard card, std::string_view summary) {
  if (!EndsWith(card.heading, kUpdatedMarker)) {
    card.heading += kUpdatedMarker;
  }
  std::string marker = EditMarker(summary);
  if (!EndsWith(card.description, marker)) card.description += marker;
  return card;
}

std::vector<InsightCard> RenameCards(const PolicyEdit& edit,
                                     const std::vector<InsightCard>& cards) {
  std::vector<InsightCard> out;
  out.reserve(cards.size());
  for (const InsightCard& c : cards) out.push_back(SwapCard(c, edit));
  return out;
}

}  // namespace

std::string_view ToString(PolicyField field) {
  switch (field) {
    case PolicyField::kDescription: return "description";
    case PolicyField::kExplanation: return "explanation";
    case PolicyField::kSubject: return "subject";
    case PolicyField::kResource: return "resource";
    case PolicyField::kAction: return "action";
    case PolicyField::kContext: return "context";
  }
  return "description";
}

std::optional<PolicyField> PolicyFieldFromString(std::string_view s) {
  for (PolicyField f : kAllFields) {
    if (ToString(f) == s) return f;
  }
  return std::nullopt;
}

std::string& FieldRef(Policy& policy, PolicyField field) {
  switch (field) {
    case PolicyField::kDescription: return policy.description;
    case PolicyField::kExplanation: return policy.explanation;
    case PolicyField::kSubject: return policy.subject;
    case PolicyField::kResource: return policy.resource;
    case PolicyField::kAction: return policy.action;
    case PolicyField::kContext: return policy.context;
  }
  return policy.description;
}

const std::string& FieldRef(const Policy& policy, PolicyField field) {
  return FieldRef(const_cast<Policy&>(policy), field);
}

std::string_view ToString(EditType type) {
  switch (type) {
    case EditType::kRenameSubject: return "rename_subject";
    case EditType::kRenameResource: return "rename_resource";
    case EditType::kActionChange: return "action_change";
    case EditType::kContextChange: return "context_change";
    case EditType::kTextOnly: return "text_only";
  }
  return "text_only";
}

EditType ClassifyEdit(PolicyField field, std::string_view old_value,
                      std::string_view new_value) {
  if (old_value == new_value) {
    Fail(ErrorCode::kNoOpEdit, "the new " + std::string(ToString(field)) +
                                   " equals the current one");
  }
  switch (field) {
    case PolicyField::kSubject: return EditType::kRenameSubject;
    case PolicyField::kResource: return EditType::kRenameResource;
    case PolicyField::kAction: return EditType::kActionChange;
    case PolicyField::kContext: return EditType::kContextChange;
    case PolicyField::kDescription:
    case PolicyField::kExplanation:
      return EditType::kTextOnly;
  }
  return EditType::kTextOnly;
}

PolicyEdit MakeEdit(const std::vector<Policy>& policies,
                    std::string_view policy_number, PolicyField field,
                    std::string new_value) {
  const Policy* p = FindPolicy(policies, policy_number);
  if (!p) Fail(ErrorCode::kNotFound, "unknown policy " + std::string(policy_number));
  PolicyEdit edit;
  edit.policy_number = p->policy_number;
  edit.field = field;
  edit.old_value = FieldRef(*p, field);
  edit.new_value = std::move(new_value);
  edit.type = ClassifyEdit(field, edit.old_value, edit.new_value);
  return edit;
}

std::vector<Policy> ApplyFieldEdit(const PolicyEdit& edit,
                                   std::vector<Policy> policies) {
  for (Policy& p : policies) {
    if (p.policy_number == edit.policy_number) {
      FieldRef(p, edit.field) = edit.new_value;
    }
  }
  return policies;
}

std::string ReplaceWholeToken(std::string_view text, std::string_view from,
                              std::string_view to) {
  if (from.empty()) return std::string(text);
  const bool check_front = IsWordChar(from.front());
  const bool check_back = IsWordChar(from.back());
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t hit = text.find(from, pos);
    if (hit == std::string_view::npos) break;
    std::size_t end = hit + from.size();
    bool front_ok = !check_front || hit == 0 || !IsWordChar(text[hit - 1]);
    bool back_ok = !check_back || end == text.size() || !IsWordChar(text[end]);
    if (front_ok && back_ok) {
      out.append(text.substr(pos, hit - pos));
      out.append(to);
      pos = end;
    } else {
      out.append(text.substr(pos, hit + 1 - pos));
      pos = hit + 1;
    }
  }
  out.append(text.substr(pos));
  return out;
}

RippleResult ReferenceOracle(const PolicyEdit& edit,
                             const std::vector<Policy>& policies) {
  RippleResult result;
  result.source = "oracle";
  if (edit.type == EditType::kTextOnly) {
    result.policies = ApplyFieldEdit(edit, policies);
    result.summary = "Edited the " + std::string(ToString(edit.field)) +
                     " of " + edit.policy_number;
    return result;
  }
  if (!IsRename(edit.type)) {
    Fail(ErrorCode::kInvalidArgument,
         "the reference covers renames and text edits only");
  }
  std::vector<Policy> edited = ApplyFieldEdit(edit, policies);
  result.policies = edited;
  std::size_t changed = 0;
  bool beyond_field = false;
  for (std::size_t i = 0; i < result.policies.size(); ++i) {
    Policy& p = result.policies[i];
    for (PolicyField f : kAllFields) {
      // The user's own edit is final; rescanning it would rename twice
      // when the new value contains the old one.
      if (p.policy_number == edit.policy_number && f == edit.field) continue;
      std::string& text = FieldRef(p, f);
      text = ReplaceWholeToken(text, edit.old_value, edit.new_value);
    }
    bool touched = !SameText(p, edited[i]);
    beyond_field = beyond_field || touched;
    if (touched || p.policy_number == edit.policy_number) ++changed;
  }
  result.has_ripple = beyond_field;
  result.summary = RenameSummary(edit, changed);
  result.collision = FindCollision(edit, policies);
  return result;
}

RippleResult PropagatePolicies(const PolicyEdit& edit,
                               const std::vector<Policy>& policies,
                               const Gateway& gateway,
                               const std::string& session_id, CallLog& log) {
  if (edit.type == EditType::kTextOnly) {
    RippleResult result = ReferenceOracle(edit, policies);
    result.source = "fast_path";
    return result;
  }
  std::vector<Policy> original = ApplyFieldEdit(edit, policies);

  ChatRequest request;
  request.kind = CallKind::kPolicyPropagation;
  request.system_prompt = std::string(PromptText(PromptId::kPolicyPropagation));
  request.user_turns.push_back(TextPart{EditHeader(edit) +
                                        "\n## Policies (edit applied)\n" +
                                        PoliciesText(original)});
  request.schema_id = std::string(ToString(SchemaId::kPolicyRipple));

  std::optional<PolicyRippleResponse> reply;
  std::string failure;
  try {
    reply = ParsePolicyRipple(gateway.Invoke(request, session_id, log));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSchemaError && !IsTransportFailure(e.code())) {
      throw;
    }
    failure = e.what();
  }

  if (!reply) {
    spdlog::warn("policy propagation unavailable ({}); using fallback", failure);
    if (IsRename(edit.type)) return ReferenceOracle(edit, policies);
    RippleResult result;
    result.policies = std::move(original);
    result.summary = "Edited the " + std::string(ToString(edit.field)) +
                     " of " + edit.policy_number;
    result.degraded = true;
    result.source = "original";
    return result;
  }

  std::map<std::string, const Policy*, std::less<>> by_number;
  for (const Policy& p : reply->policies) by_number.emplace(p.policy_number, &p);
  bool complete = reply->policies.size() >= original.size();
  for (const Policy& p : original) {
    complete = complete && by_number.count(p.policy_number) > 0;
  }
  if (!complete) {
    spdlog::warn("policy propagation returned {} of {} policies; keeping the "
                 "original array",
                 reply->policies.size(), original.size());
    RippleResult result;
    result.policies = std::move(original);
    result.summary = reply->summary;
    result.degraded = true;
    result.source = "original";
    result.collision =
        IsRename(edit.type) ? FindCollision(edit, policies) : std::nullopt;
    return result;
  }

  if (IsRename(edit.type)) {
    RippleResult oracle = ReferenceOracle(edit, policies);
    bool diverged = false;
    for (const Policy& p : oracle.policies) {
      diverged = diverged || !SameText(p, *by_number.at(p.policy_number));
    }
    if (diverged) {
      spdlog::warn("rename propagation diverged from the reference; using "
                   "the reference");
      oracle.divergence = true;
    } else {
      oracle.source = "model";
    }
    return oracle;
  }

  // Action and context changes: only the edited policy's prose moves.
  RippleResult result;
  result.policies = std::move(original);
  for (Policy& p : result.policies) {
    if (p.policy_number != edit.policy_number) continue;
    const Policy& m = *by_number.at(p.policy_number);
    p.description = m.description;
    p.explanation = m.explanation;
  }
  result.has_ripple = reply->has_ripple;
  result.summary = reply->summary;
  result.source = "model";
  return result;
}

std::string EditMarker(std::string_view change_summary) {
  return " [Edit: may be affected by " + std::string(change_summary) + "]";
}

std::string ChangeSummary(const PolicyEdit& edit) {
  return std::string(ToString(edit.field)) + " of " + edit.policy_number +
         " changed to '" + edit.new_value + "'";
}

bool IsRippleCandidate(const InsightCard& card, const Policy& edited) {
  if (card.relevant_policies && !card.relevant_policies->empty()) {
    const auto& rel = *card.relevant_policies;
    return std::find(rel.begin(), rel.end(), edited.policy_number) != rel.end();
  }
  if (card.type == IssueType::kVignette) return false;
  for (const std::string& e : card.elements) {
    if (std::find(edited.elements.begin(), edited.elements.end(), e) !=
        edited.elements.end()) {
      return true;
    }
  }
  return false;
}

InsightRippleResult PropagateInsights(const PolicyEdit& edit,
                                      const RippleResult& phase1,
                                      const std::vector<Policy>& policies,
                                      const std::vector<InsightCard>& cards,
                                      const Gateway& gateway,
                                      const std::string& session_id,
                                      CallLog& log) {
  InsightRippleResult result;
  result.insights = cards;
  if (!phase1.has_ripple || cards.empty() || edit.type == EditType::kTextOnly) {
    result.skipped = true;
    return result;
  }

  ChatRequest request;
  request.kind = CallKind::kInsightPropagation;
  request.system_prompt = std::string(PromptText(PromptId::kInsightPropagation));
  request.user_turns.push_back(TextPart{
      EditHeader(edit) + "Policy change summary: " + phase1.summary +
      "\n\n## Policies (after propagation)\n" + PoliciesText(policies) +
      "\n\n## Insights\n" + InsightsText(cards)});
  request.schema_id = std::string(ToString(SchemaId::kInsightRipple));

  std::optional<InsightRippleResponse> reply;
  std::string failure;
  try {
    reply = ParseInsightRipple(gateway.Invoke(request, session_id, log));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSchemaError && !IsTransportFailure(e.code())) {
      throw;
    }
    failure = e.what();
  }

  std::map<std::string, const InsightCard*, std::less<>> by_id;
  if (reply) {
    for (const InsightCard& c : reply->insights) by_id.emplace(c.id, &c);
  }
  bool complete = reply && reply->insights.size() >= cards.size();
  for (const InsightCard& c : cards) complete = complete && by_id.count(c.id);

  if (IsRename(edit.type)) {
    // The swap is literal, so the reference decides; the reply only matters
    // for logging.
    result.insights = RenameCards(edit, cards);
    if (complete) {
      for (const InsightCard& c : result.insights) {
        const InsightCard& m = *by_id.at(c.id);
        if (m.heading != c.heading || m.description != c.description ||
            m.rationale != c.rationale) {
          spdlog::warn("insight rename diverged on {}; using the reference",
                       c.id);
        }
      }
    } else if (!reply) {
      spdlog::warn("insight propagation unavailable ({}); using the reference",
                   failure);
    }
    result.has_changes = result.insights != cards;
    result.summary = result.has_changes
                         ? "Renamed '" + edit.old_value + "' to '" +
                               edit.new_value + "' in insights"
                         : "No insights mention '" + edit.old_value + "'";
    return result;
  }

  if (!complete) {
    spdlog::warn("insight propagation unusable ({}); keeping the original "
                 "array",
                 reply ? "short reply" : failure);
    result.degraded = true;
    result.summary = reply ? reply->summary : "insights unchanged";
    return result;
  }

  const Policy* edited = FindPolicy(policies, edit.policy_number);
  std::string change = ChangeSummary(edit);
  std::size_t updated = 0;
  for (InsightCard& card : result.insights) {
    if (!edited || !IsRippleCandidate(card, *edited)) continue;
    const InsightCard& m = *by_id.at(card.id);
    if (!ModelMarkedAffected(card, m)) continue;
    InsightCard marked = MarkCard(card, change);
    if (card.type == IssueType::kVignette && m.expected_outcome) {
      marked.expected_outcome = m.expected_outcome;
    }
    if (marked != card) {
      card = std::move(marked);
      ++updated;
    }
  }
  result.has_changes = updated > 0;
  result.summary = result.has_changes ? reply->summary : "No insights affected";
  return result;
}

PolicyEditOutcome ApplyPolicyEdit(SessionState& session, const Gateway& gateway,
                                  std::string_view policy_number,
                                  PolicyField field, std::string new_value) {
  PolicyEditOutcome outcome;
  outcome.edit = MakeEdit(session.policies, policy_number, field,
                          std::move(new_value));
  outcome.policies = PropagatePolicies(outcome.edit, session.policies, gateway,
                                       session.session_id, session.call_log);

  std::vector<InsightCard> live = session.insights.LiveCards();
  for (InsightCard& v : session.vignettes.LiveCards()) live.push_back(std::move(v));
  outcome.insights =
      PropagateInsights(outcome.edit, outcome.policies, outcome.policies.policies,
                        live, gateway, session.session_id, session.call_log);

  session.policies = outcome.policies.policies;
  for (const InsightCard& c : outcome.insights.insights) {
    InsightLedger& ledger =
        c.type == IssueType::kVignette ? session.vignettes : session.insights;
    ledger.UpdateCard(c);
  }
  if (outcome.policies.collision) {
    session.status_note = *outcome.policies.collision;
  }
  session.audit_log.push_back(
      {"policy_edit", outcome.edit.policy_number + "." +
                          std::string(ToString(field)) + " (" +
                          std::string(ToString(outcome.edit.type)) + "): " +
                          outcome.policies.summary});
  return outcome;
}

Json ToJson(const PolicyEdit& edit) {
  return Json{{"policyNumber", edit.policy_number},
              {"field", ToString(edit.field)},
              {"oldValue", edit.old_value},
              {"newValue", edit.new_value},
              {"editType", ToString(edit.type)}};
}

Json ToJson(const RippleResult& result) {
  Json out = Json{{"hasRipple", result.has_ripple},
                  {"summary", result.summary},
                  {"policies", PoliciesToJson(result.policies)},
                  {"degraded", result.degraded},
                  {"divergence", result.divergence},
                  {"source", result.source}};
  out["collision"] = result.collision ? Json(*result.collision) : Json();
  return out;
}

Json ToJson(const InsightRippleResult& result) {
  return Json{{"hasChanges", result.has_changes},
              {"summary", result.summary},
              {"insights", InsightsToJson(result.insights)},
              {"degraded", result.degraded},
              {"skipped", result.skipped}};
}

Json ToJson(const PolicyEditOutcome& outcome) {
  return Json{{"edit", ToJson(outcome.edit)},
              {"policyRipple", ToJson(outcome.policies)},
              {"insightRipple", ToJson(outcome.insights)}};
}

}  // namespace sbac
