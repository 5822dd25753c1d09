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

#include "sbac/policy_model.h"

#include <array>
#include <regex>

#include "sbac/errors.h"

namespace sbac {
namespace {

constexpr std::string_view kHappeningLabel = "What's happening: ";
constexpr std::string_view kExpectedSeparator = " | What's expected: ";
constexpr std::string_view kWhyItMattersSeparator = " | Why it matters: ";
constexpr std::string_view kWhatThisTestsSeparator = " | What this tests: ";

constexpr std::array<RiskPatternInfo, 7> kRiskPatterns = {{
    {RiskPattern::kOverPrivilege, "over_privilege", "CWE-285",
     "Violation of least privilege"},
    {RiskPattern::kPrivilegeEscalation, "privilege_escalation", "CWE-285",
     "Privilege escalation"},
    {RiskPattern::kMissingAuthorization, "missing_authorization", "CWE-862",
     "Missing authorization"},
    {RiskPattern::kInsecureDefaults, "insecure_defaults", "CWE-276",
     "Incorrect default permissions"},
    {RiskPattern::kIndirectAccessPath, "indirect_access_path", "CWE-284",
     "Access control bypass"},
    {RiskPattern::kMissingInstanceScoping, "missing_instance_scoping",
     "CWE-639", "IDOR"},
    {RiskPattern::kTrustBoundaryViolation, "trust_boundary_violation",
     "CWE-668", "CORS misconfiguration"},
}};

const std::regex& MarkRefPattern() {
  static const std::regex kPattern(R"(\[[0-9]+\])");
  return kPattern;
}

void CheckTextField(ValidationReport& report, std::string_view name,
                    const std::string& value, bool allow_empty = false) {
  if (value.empty() && !allow_empty) {
    report.push_back({std::string(name), "must not be empty"});
    return;
  }
  if (ContainsMarkRef(value)) {
    report.push_back({std::string(name), "mark reference in text field"});
  }
}

void CheckElements(ValidationReport& report,
                   const std::vector<std::string>& elements,
                   const std::set<int>& known_marks) {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    std::optional<int> mark = ParseMarkRef(elements[i]);
    if (!mark) {
      report.push_back({IndexPath("elements", i),
                        "malformed mark reference " + elements[i]});
    } else if (!known_marks.empty() && known_marks.count(*mark) == 0) {
      report.push_back({IndexPath("elements", i),
                        "unknown mark reference " + elements[i]});
    }
  }
}

bool IsPolicyNumber(std::string_view s) {
  static const std::regex kPattern("policy[1-9][0-9]*");
  return std::regex_match(s.begin(), s.end(), kPattern);
}

}  // namespace

std::string_view ToString(IssueType type) {
  switch (type) {
    case IssueType::kRisk: return "risk";
    case IssueType::kAmbiguity: return "ambiguity";
    case IssueType::kConflict: return "conflict";
    case IssueType::kVignette: return "vignette";
  }
  return "risk";
}

std::optional<IssueType> IssueTypeFromString(std::string_view s) {
  if (s == "risk") return IssueType::kRisk;
  if (s == "ambiguity") return IssueType::kAmbiguity;
  if (s == "conflict") return IssueType::kConflict;
  if (s == "vignette") return IssueType::kVignette;
  return std::nullopt;
}

std::string_view ToString(ExpectedOutcome outcome) {
  switch (outcome) {
    case ExpectedOutcome::kAllow: return "Allow";
    case ExpectedOutcome::kDeny: return "Deny";
    case ExpectedOutcome::kAmbiguous: return "Ambiguous";
  }
  return "Ambiguous";
}

std::optional<ExpectedOutcome> ExpectedOutcomeFromString(std::string_view s) {
  if (s == "Allow") return ExpectedOutcome::kAllow;
  if (s == "Deny") return ExpectedOutcome::kDeny;
  if (s == "Ambiguous") return ExpectedOutcome::kAmbiguous;
  return std::nullopt;
}

std::span<const RiskPatternInfo> AllRiskPatterns() { return kRiskPatterns; }

const RiskPatternInfo& InfoFor(RiskPattern pattern) {
  for (const RiskPatternInfo& info : kRiskPatterns) {
    if (info.pattern == pattern) return info;
  }
  return kRiskPatterns[0];
}

std::optional<RiskPattern> RiskPatternFromString(std::string_view name) {
  for (const RiskPatternInfo& info : kRiskPatterns) {
    if (info.name == name) return info.pattern;
  }
  return std::nullopt;
}

Rationale ParseRationale(std::string_view text) {
  auto malformed = [&](const std::string& why) {
    Fail(ErrorCode::kMalformedRationale,
         "malformed rationale (" + why + "): " + std::string(text));
  };
  if (text.substr(0, kHappeningLabel.size()) != kHappeningLabel) {
    malformed("missing \"What's happening\" segment");
  }
  std::string_view rest = text.substr(kHappeningLabel.size());
  std::size_t expected_at = rest.find(kExpectedSeparator);
  if (expected_at == std::string_view::npos) {
    malformed("missing \"What's expected\" segment");
  }
  Rationale r;
  r.happening = std::string(rest.substr(0, expected_at));
  rest = rest.substr(expected_at + kExpectedSeparator.size());

  std::size_t why_at = rest.find(kWhyItMattersSeparator);
  std::size_t tests_at = rest.find(kWhatThisTestsSeparator);
  if (why_at == std::string_view::npos && tests_at == std::string_view::npos) {
    malformed("missing third segment or unknown label");
  }
  std::size_t sep_len;
  std::size_t at;
  if (tests_at == std::string_view::npos ||
      (why_at != std::string_view::npos && why_at < tests_at)) {
    at = why_at;
    sep_len = kWhyItMattersSeparator.size();
    r.kind = ConsequenceKind::kWhyItMatters;
  } else {
    at = tests_at;
    sep_len = kWhatThisTestsSeparator.size();
    r.kind = ConsequenceKind::kWhatThisTests;
  }
  r.expected = std::string(rest.substr(0, at));
  r.consequence = std::string(rest.substr(at + sep_len));
  if (r.happening.empty() || r.expected.empty() || r.consequence.empty()) {
    malformed("empty segment");
  }
  return r;
}

std::string RenderRationale(const Rationale& rationale) {
  if (rationale.happening.empty() || rationale.expected.empty() ||
      rationale.consequence.empty()) {
    Fail(ErrorCode::kEmptySegment, "rationale segments must be non-empty");
  }
  std::string out(kHappeningLabel);
  out += rationale.happening;
  out += kExpectedSeparator;
  out += rationale.expected;
  out += rationale.kind == ConsequenceKind::kWhyItMatters
             ? kWhyItMattersSeparator
             : kWhatThisTestsSeparator;
  out += rationale.consequence;
  return out;
}

std::string Describe(const ValidationReport& report) {
  std::string out;
  for (const Violation& v : report) {
    if (!out.empty()) out += "; ";
    out += v.path + ": " + v.message;
  }
  return out;
}

std::optional<int> ParseMarkRef(std::string_view ref) {
  if (ref.size() < 3 || ref.size() > 11 || ref.front() != '[' ||
      ref.back() != ']') {
    return std::nullopt;
  }
  int value = 0;
  for (char c : ref.substr(1, ref.size() - 2)) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  if (value <= 0) return std::nullopt;
  return value;
}

std::string MarkRef(int mark) { return "[" + std::to_string(mark) + "]"; }

bool ContainsMarkRef(std::string_view text) {
  return std::regex_search(text.begin(), text.end(), MarkRefPattern());
}

ValidationReport ValidatePolicy(const Policy& policy,
                                const std::set<int>& known_marks) {
  ValidationReport report;
  if (!IsPolicyNumber(policy.policy_number)) {
    report.push_back({"policyNumber", "must match policy<positive integer>"});
  }
  CheckTextField(report, "description", policy.description);
  CheckTextField(report, "explanation", policy.explanation);
  CheckTextField(report, "subject", policy.subject);
  CheckTextField(report, "resource", policy.resource);
  CheckTextField(report, "action", policy.action);
  CheckTextField(report, "context", policy.context);
  CheckElements(report, policy.elements, known_marks);
  return report;
}

ValidationReport ValidatePolicySet(std::span<const Policy> policies,
                                   const std::set<int>& known_marks) {
  ValidationReport report;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    std::string base = IndexPath("policies", i);
    for (Violation& v : ValidatePolicy(policies[i], known_marks)) {
      report.push_back({base + "." + v.path, std::move(v.message)});
    }
    if (!seen.insert(policies[i].policy_number).second) {
      report.push_back({base + ".policyNumber",
                        "duplicate policyNumber " + policies[i].policy_number});
    }
  }
  return report;
}

ValidationReport ValidateInsight(const InsightCard& card,
                                 const std::set<std::string>& policy_numbers,
                                 const std::set<int>& known_marks) {
  ValidationReport report;
  std::string_view prefix = ToString(card.type);
  std::string_view id = card.id;
  bool id_ok = id.size() > prefix.size() && id.substr(0, prefix.size()) == prefix;
  if (id_ok) {
    for (char c : id.substr(prefix.size())) id_ok = id_ok && c >= '0' && c <= '9';
  }
  if (!id_ok) {
    report.push_back({"id", "id must be the type name followed by a number"});
  }
  if (card.heading.empty()) {
    report.push_back({"heading", "must not be empty"});
  } else if (card.heading.size() > kMaxHeadingLength) {
    report.push_back({"heading", "longer than 120 characters"});
  }
  if (card.description.empty()) {
    report.push_back({"description", "must not be empty"});
  }
  CheckElements(report, card.elements, known_marks);

  bool is_vignette = card.type == IssueType::kVignette;
  if (is_vignette !=
      (card.rationale.kind == ConsequenceKind::kWhatThisTests)) {
    report.push_back({"rationale", is_vignette
                                       ? "vignettes use \"What this tests\""
                                       : "insights use \"Why it matters\""});
  }
  if (is_vignette != card.expected_outcome.has_value()) {
    report.push_back({"expectedOutcome", is_vignette
                                             ? "required for vignettes"
                                             : "only allowed on vignettes"});
  }
  if (is_vignette != card.relevant_policies.has_value()) {
    report.push_back({"relevantPolicies", is_vignette
                                              ? "required for vignettes"
                                              : "only allowed on vignettes"});
  }
  if (card.relevant_policies) {
    for (std::size_t i = 0; i < card.relevant_policies->size(); ++i) {
      const std::string& pn = (*card.relevant_policies)[i];
      if (policy_numbers.count(pn) == 0) {
        report.push_back({IndexPath("relevantPolicies", i),
                          "unknown policy " + pn});
      }
    }
  }
  return report;
}

IssueType ClassifyIssueKind(const DraftFinding& finding) {
  switch (finding.flag) {
    case FindingFlag::kDangerAsWritten: return IssueType::kRisk;
    case FindingFlag::kNeedsMoreInformation: return IssueType::kAmbiguity;
    case FindingFlag::kContradictoryDecisions: return IssueType::kConflict;
  }
  return IssueType::kAmbiguity;
}

Json PolicyToJson(const Policy& policy) {
  Json out = Json::object();
  out["policyNumber"] = policy.policy_number;
  out["description"] = policy.description;
  out["explanation"] = policy.explanation;
  out["subject"] = policy.subject;
  out["resource"] = policy.resource;
  out["action"] = policy.action;
  out["context"] = policy.context;
  out["elements"] = policy.elements;
  for (auto it = policy.extra.begin(); it != policy.extra.end(); ++it) {
    out[it.key()] = it.value();
  }
  return out;
}

Policy PolicyFromJson(const Json& value, const std::string& path,
                      UnknownFields mode) {
  ObjectReader r(value, path);
  Policy p;
  p.policy_number = r.RequiredString("policyNumber");
  p.description = r.RequiredString("description");
  p.explanation = r.RequiredString("explanation");
  p.subject = r.RequiredString("subject");
  p.resource = r.RequiredString("resource");
  p.action = r.RequiredString("action");
  p.context = r.RequiredString("context");
  p.elements = r.RequiredStringArray("elements");
  p.extra = r.Finish(mode);
  return p;
}

Json InsightToJson(const InsightCard& card) {
  Json out = Json::object();
  out["id"] = card.id;
  out["type"] = ToString(card.type);
  out["heading"] = card.heading;
  out["description"] = card.description;
  out["elements"] = card.elements;
  out["rationale"] = RenderRationale(card.rationale);
  if (card.is_accepted.value_or(false)) out["isAccepted"] = true;
  if (card.expected_outcome) {
    out["expectedOutcome"] = ToString(*card.expected_outcome);
  }
  if (card.relevant_policies) out["relevantPolicies"] = *card.relevant_policies;
  for (auto it = card.extra.begin(); it != card.extra.end(); ++it) {
    out[it.key()] = it.value();
  }
  return out;
}

InsightCard InsightFromJson(const Json& value, const std::string& path,
                            UnknownFields mode) {
  ObjectReader r(value, path);
  InsightCard card;
  card.id = r.RequiredNonEmptyString("id");
  std::string type = r.RequiredString("type");
  std::optional<IssueType> parsed_type = IssueTypeFromString(type);
  if (!parsed_type) {
    throw SchemaError(r.PathOf("type"), "unknown issue type \"" + type + "\"");
  }
  card.type = *parsed_type;
  card.heading = r.RequiredString("heading");
  card.description = r.RequiredString("description");
  card.elements = r.RequiredStringArray("elements");
  std::string rationale = r.RequiredString("rationale");
  try {
    card.rationale = ParseRationale(rationale);
  } catch (const Error& e) {
    throw SchemaError(r.PathOf("rationale"), e.what());
  }
  if (r.OptionalBool("isAccepted").value_or(false)) card.is_accepted = true;
  if (std::optional<std::string> outcome = r.OptionalString("expectedOutcome")) {
    card.expected_outcome = ExpectedOutcomeFromString(*outcome);
    if (!card.expected_outcome) {
      throw SchemaError(r.PathOf("expectedOutcome"),
                        "unknown outcome \"" + *outcome + "\"");
    }
  }
  card.relevant_policies = r.OptionalStringArray("relevantPolicies");
  card.extra = r.Finish(mode);
  return card;
}

Json PoliciesToJson(std::span<const Policy> policies) {
  Json out = Json::array();
  for (const Policy& p : policies) out.push_back(PolicyToJson(p));
  return out;
}

std::vector<Policy> PoliciesFromJson(const Json& value,
                                     const std::string& path,
                                     UnknownFields mode) {
  if (!value.is_array()) throw SchemaError(path, "expected an array");
  std::vector<Policy> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(PolicyFromJson(value[i], IndexPath(path, i), mode));
  }
  return out;
}

Json InsightsToJson(std::span<const InsightCard> cards) {
  Json out = Json::array();
  for (const InsightCard& c : cards) out.push_back(InsightToJson(c));
  return out;
}

std::vector<InsightCard> InsightsFromJson(const Json& value,
                                          const std::string& path,
                                          UnknownFields mode) {
  if (!value.is_array()) throw SchemaError(path, "expected an array");
  std::vector<InsightCard> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(InsightFromJson(value[i], IndexPath(path, i), mode));
  }
  return out;
}

std::set<std::string> PolicyNumbers(std::span<const Policy> policies) {
  std::set<std::string> out;
  for (const Policy& p : policies) out.insert(p.policy_number);
  return out;
}

}  // namespace sbac
