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

#ifndef SBAC_RIPPLE_ENGINE_H_
#define SBAC_RIPPLE_ENGINE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbac/llm_gateway.h"
#include "sbac/policy_model.h"
#include "sbac/session_state.h"

namespace sbac {

// The six user-editable text fields of a policy.
enum class PolicyField {
  kDescription,
  kExplanation,
  kSubject,
  kResource,
  kAction,
  kContext,
};

std::string_view ToString(PolicyField field);
std::optional<PolicyField> PolicyFieldFromString(std::string_view s);
std::string& FieldRef(Policy& policy, PolicyField field);
const std::string& FieldRef(const Policy& policy, PolicyField field);

enum class EditType {
  kRenameSubject,
  kRenameResource,
  kActionChange,
  kContextChange,
  kTextOnly,
};

std::string_view ToString(EditType type);

// Depends only on the field. Throws Error(kNoOpEdit) when the values match.
EditType ClassifyEdit(PolicyField field, std::string_view old_value,
                      std::string_view new_value);

struct PolicyEdit {
  std::string policy_number;
  PolicyField field = PolicyField::kDescription;
  std::string old_value;
  std::string new_value;
  EditType type = EditType::kTextOnly;
};

// Looks the policy up and classifies. Throws Error(kNotFound) or
// Error(kNoOpEdit).
PolicyEdit MakeEdit(const std::vector<Policy>& policies,
                    std::string_view policy_number, PolicyField field,
                    std::string new_value);

// `policies` with only the edited field changed.
std::vector<Policy> ApplyFieldEdit(const PolicyEdit& edit,
                                   std::vector<Policy> policies);

// Replaces whole-token, case-sensitive occurrences of `from`. An occurrence
// counts only when the characters around it are not word characters (on the
// sides where `from` itself begins or ends with one). Single left-to-right
// pass, so a replacement is never rescanned.
std::string ReplaceWholeToken(std::string_view text, std::string_view from,
                              std::string_view to);

struct RippleResult {
  bool has_ripple = false;
  std::string summary;
  std::vector<Policy> policies;
  // Set when the model reply was short or unusable and the original array
  // (with the field edit) was kept.
  bool degraded = false;
  // The model's rename disagreed with the reference; the reference was used.
  bool divergence = false;
  // A rename onto a name another policy already uses. Never auto-merged.
  std::optional<std::string> collision;
  std::string source;  // "fast_path", "model", "oracle" or "original"
};

// Deterministic find-and-replace for rename and text-only edits. `policies`
// is the pre-edit set. Throws Error(kInvalidArgument) for other edit types.
RippleResult ReferenceOracle(const PolicyEdit& edit,
                             const std::vector<Policy>& policies);

// Phase 1. Text-only edits never call the model.
RippleResult PropagatePolicies(const PolicyEdit& edit,
                               const std::vector<Policy>& policies,
                               const Gateway& gateway,
                               const std::string& session_id, CallLog& log);

struct InsightRippleResult {
  bool has_changes = false;
  std::string summary;
  std::vector<InsightCard> insights;
  bool degraded = false;
  bool skipped = false;
};

// Marker texts appended on a semantic impact.
inline constexpr std::string_view kUpdatedMarker = " [Updated]";
std::string EditMarker(std::string_view change_summary);

// Short description of an action or context change used in markers.
std::string ChangeSummary(const PolicyEdit& edit);

// Cards that an action/context change on `edited` may touch.
bool IsRippleCandidate(const InsightCard& card, const Policy& edited);

// Phase 2 over `cards` (the live cards). `policies` is the phase-1 output.
InsightRippleResult PropagateInsights(const PolicyEdit& edit,
                                      const RippleResult& phase1,
                                      const std::vector<Policy>& policies,
                                      const std::vector<InsightCard>& cards,
                                      const Gateway& gateway,
                                      const std::string& session_id,
                                      CallLog& log);

struct PolicyEditOutcome {
  PolicyEdit edit;
  RippleResult policies;
  InsightRippleResult insights;
};

// One PATCH: both phases, committed to `session` together.
PolicyEditOutcome ApplyPolicyEdit(SessionState& session, const Gateway& gateway,
                                  std::string_view policy_number,
                                  PolicyField field, std::string new_value);

Json ToJson(const PolicyEdit& edit);
Json ToJson(const RippleResult& result);
Json ToJson(const InsightRippleResult& result);
Json ToJson(const PolicyEditOutcome& outcome);

}  // namespace sbac

#endif  // SBAC_RIPPLE_ENGINE_H_
