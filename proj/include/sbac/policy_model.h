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

#ifndef SBAC_POLICY_MODEL_H_
#define SBAC_POLICY_MODEL_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbac/json_util.h"

namespace sbac {

enum class IssueType { kRisk, kAmbiguity, kConflict, kVignette };
enum class ExpectedOutcome { kAllow, kDeny, kAmbiguous };
enum class ConsequenceKind { kWhyItMatters, kWhatThisTests };

std::string_view ToString(IssueType type);
std::optional<IssueType> IssueTypeFromString(std::string_view s);
std::string_view ToString(ExpectedOutcome outcome);
std::optional<ExpectedOutcome> ExpectedOutcomeFromString(std::string_view s);

// OWASP A01 patterns that are detectable from a policy specification.
enum class RiskPattern {
  kOverPrivilege,
  kPrivilegeEscalation,
  kMissingAuthorization,
  kInsecureDefaults,
  kIndirectAccessPath,
  kMissingInstanceScoping,
  kTrustBoundaryViolation,
};

struct RiskPatternInfo {
  RiskPattern pattern;
  std::string_view name;
  std::string_view cwe;
  std::string_view owasp_pattern;
};

std::span<const RiskPatternInfo> AllRiskPatterns();
const RiskPatternInfo& InfoFor(RiskPattern pattern);
std::optional<RiskPattern> RiskPatternFromString(std::string_view name);

// Three-part contextual-integrity rationale attached to every card.
struct Rationale {
  std::string happening;
  std::string expected;
  std::string consequence;
  ConsequenceKind kind = ConsequenceKind::kWhyItMatters;

  bool operator==(const Rationale&) const = default;
};

// Throws Error(kMalformedRationale).
Rationale ParseRationale(std::string_view text);
// Throws Error(kEmptySegment) if any segment is empty.
std::string RenderRationale(const Rationale& rationale);

// One ABAC rule. `context` holds the literal "None" when unconditional.
struct Policy {
  std::string policy_number;
  std::string description;
  std::string explanation;
  std::string subject;
  std::string resource;
  std::string action;
  std::string context;
  std::vector<std::string> elements;
  // Unknown members of a stored document, re-emitted on serialization.
  Json extra = Json::object();

  bool operator==(const Policy&) const = default;
};

struct InsightCard {
  std::string id;
  IssueType type = IssueType::kRisk;
  std::string heading;
  std::string description;
  std::vector<std::string> elements;
  Rationale rationale;
  // Absent means never acted on. False is normalized away on input.
  std::optional<bool> is_accepted;
  std::optional<ExpectedOutcome> expected_outcome;
  std::optional<std::vector<std::string>> relevant_policies;
  Json extra = Json::object();

  bool operator==(const InsightCard&) const = default;
};

inline constexpr std::size_t kMaxHeadingLength = 120;
inline constexpr std::string_view kNoContext = "None";

struct Violation {
  std::string path;
  std::string message;
};
using ValidationReport = std::vector<Violation>;

std::string Describe(const ValidationReport& report);

// "[12]" -> 12. Rejects anything not matching \[[0-9]+\] or a zero mark.
std::optional<int> ParseMarkRef(std::string_view ref);
std::string MarkRef(int mark);
bool ContainsMarkRef(std::string_view text);

// `known_marks` empty disables the membership check.
ValidationReport ValidatePolicy(const Policy& policy,
                                const std::set<int>& known_marks);
// Adds policyNumber uniqueness on top of ValidatePolicy.
ValidationReport ValidatePolicySet(std::span<const Policy> policies,
                                   const std::set<int>& known_marks);
ValidationReport ValidateInsight(const InsightCard& card,
                                 const std::set<std::string>& policy_numbers,
                                 const std::set<int>& known_marks);

// What the analysis model concluded about a draft finding.
enum class FindingFlag {
  kDangerAsWritten,
  kNeedsMoreInformation,
  kContradictoryDecisions,
};

struct DraftFinding {
  std::string text;
  FindingFlag flag = FindingFlag::kNeedsMoreInformation;
};

IssueType ClassifyIssueKind(const DraftFinding& finding);

Json PolicyToJson(const Policy& policy);
Policy PolicyFromJson(const Json& value, const std::string& path,
                      UnknownFields mode);
Json InsightToJson(const InsightCard& card);
InsightCard InsightFromJson(const Json& value, const std::string& path,
                            UnknownFields mode);

Json PoliciesToJson(std::span<const Policy> policies);
std::vector<Policy> PoliciesFromJson(const Json& value,
                                     const std::string& path,
                                     UnknownFields mode);
Json InsightsToJson(std::span<const InsightCard> cards);
std::vector<InsightCard> InsightsFromJson(const Json& value,
                                          const std::string& path,
                                          UnknownFields mode);

std::set<std::string> PolicyNumbers(std::span<const Policy> policies);

}  // namespace sbac

#endif  // SBAC_POLICY_MODEL_H_
