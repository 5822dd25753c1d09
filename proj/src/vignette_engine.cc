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

#include "sbac/vignette_engine.h"

#include <algorithm>
#include <cctype>
#include <set>

#include <spdlog/spdlog.h>

#include "sbac/analyze_engine.h"
#include "sbac/engine_support.h"
#include "sbac/errors.h"
#include "sbac/prompts.h"
#include "sbac/responses.h"

namespace sbac {
namespace {

// Lower case, '_' and '-' as spaces, single spaces, trimmed.
std::string Normalize(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (c == '_' || c == '-' || std::isspace(u)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(u));
  }
  return out;
}

bool HasPhrase(std::string_view text, std::string_view phrase) {
  if (phrase.empty()) return false;
  auto is_word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  };
  for (std::size_t pos = text.find(phrase); pos != std::string_view::npos;
       pos = text.find(phrase, pos + 1)) {
    std::size_t end = pos + phrase.size();
    bool front = pos == 0 || !is_word(text[pos - 1]);
    bool back = end == text.size() || !is_word(text[end]);
    if (front && back) return true;
  }
  return false;
}

bool IsGrounded(const FactorValue& v, std::span<const std::string> names) {
  std::string value = Normalize(v.value);
  std::string label = Normalize(v.label);
  for (const std::string& raw : names) {
    std::string name = Normalize(raw);
    if (name.empty()) continue;
    if (value == name || label == name) return true;
    if (HasPhrase(value, name) || HasPhrase(label, name)) return true;
  }
  return false;
}

const Assignment* FindAssignment(const CandidateCase& c, std::string_view factor) {
  for (const Assignment& a : c.assignments) {
    if (a.factor == factor) return &a;
  }
  return nullptr;
}

std::vector<const Assignment*> VariedAssignments(const CandidateCase& c) {
  std::vector<const Assignment*> out;
  for (const std::string& f : c.varied_factors) {
    if (const Assignment* a = FindAssignment(c, f)) out.push_back(a);
  }
  return out;
}

CandidateCase MakeCase(const PolicySchema& schema,
                       const std::vector<const FactorValue*>& values) {
  CandidateCase c;
  c.source_policy = schema.policy_number;
  std::vector<BoundaryType> boundaries;
  std::string diag;
  for (std::size_t i = 0; i < schema.variable_factors.size(); ++i) {
    const VariableFactor& f = schema.variable_factors[i];
    c.assignments.push_back(Assignment{f.name, f.dimension, *values[i]});
    boundaries.push_back(values[i]->boundary_type);
    if (!values[i]->is_baseline) {
      c.varied_factors.push_back(f.name);
      if (!diag.empty()) diag += ", ";
      diag += f.name + " -> " + values[i]->value + " (" +
              std::string(ToString(values[i]->boundary_type)) + ")";
    }
  }
  c.case_id = CaseId(c.source_policy, c.assignments);
  c.expected_outcome = ExpectedOutcomeFor(boundaries);
  c.diagnostics = (diag.empty() ? "baseline confirmation" : "varied " + diag) +
                  "; expected " + std::string(ToString(c.expected_outcome));
  return c;
}

bool Hinted(const VariableFactor& a, const VariableFactor& b) {
  auto has = [](const VariableFactor& f, const std::string& name) {
    return std::find(f.interaction_hints.begin(), f.interaction_hints.end(),
                     name) != f.interaction_hints.end();
  };
  return has(a, b.name) || has(b, a.name);
}

void CheckFactor(ValidationReport& report, const std::string& path,
                 const VariableFactor& f,
                 std::span<const std::string> grounding) {
  if (f.name.empty()) report.push_back({path + ".name", "must not be empty"});
  if (!f.policy_value.is_baseline ||
      f.policy_value.boundary_type != BoundaryType::kBaseline) {
    report.push_back({path + ".policyValue",
                      "must be the baseline (isBaseline true, boundaryType "
                      "baseline)"});
  }
  std::size_t n = f.alternatives.size();
  if (n < 2 || n > 4) {
    report.push_back({path + ".alternatives",
                      "needs 2 to 4 alternatives, got " + std::to_string(n)});
  }
  bool just_outside = false;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const FactorValue& v = f.alternatives[i];
    std::string ap = IndexPath(path + ".alternatives", i);
    if (v.is_baseline || v.boundary_type == BoundaryType::kBaseline) {
      report.push_back({ap, "alternatives cannot be baseline values"});
    }
    if (v.value.empty()) report.push_back({ap + ".value", "must not be empty"});
    if (v.value == f.policy_value.value) {
      report.push_back({ap + ".value", "repeats the policy value"});
    }
    if (!seen.insert(v.value).second) {
      report.push_back({ap + ".value", "duplicate alternative " + v.value});
    }
    just_outside = just_outside || v.boundary_type == BoundaryType::kJustOutside;
    bool named = f.dimension == Dimension::kSubject ||
                 f.dimension == Dimension::kResource;
    if (named && !IsGrounded(v, grounding)) {
      report.push_back({ap + ".value", "'" + v.value +
                                           "' is not a subject or resource "
                                           "from the policies or sketch"});
    }
  }
  if (n > 0 && !just_outside) {
    report.push_back({path + ".alternatives",
                      "needs at least one just_outside alternative"});
  }
}

std::string RealizationText(const SessionState& session,
                            std::span<const CandidateCase> selected,
                            const SchemaIndex& schemas) {
  Json cases = Json::array();
  for (const CandidateCase& c : selected) {
    Json assignments = Json::array();
    for (const Assignment& a : c.assignments) {
      assignments.push_back(Json{{"factor", a.factor},
                                 {"dimension", ToString(a.dimension)},
                                 {"value", a.value.value},
                                 {"label", a.value.label},
                                 {"boundaryType", ToString(a.value.boundary_type)},
                                 {"isBaseline", a.value.is_baseline}});
    }
    auto it = schemas.find(c.source_policy);
    cases.push_back(Json{
        {"caseId", c.case_id},
        {"sourcePolicy", c.source_policy},
        {"policyExplanation", it != schemas.end() ? it->second->explanation : ""},
        {"assignments", std::move(assignments)},
        {"variedFactors", c.varied_factors},
        {"expectedOutcome", ToString(c.expected_outcome)},
        {"diagnostics", c.diagnostics}});
  }
  return ScenarioText(session) + "\n\n## Canvas Element Map\n" +
         EntityMapText(session) + "\n## Policies\n" +
         PoliciesText(session.policies) + "\n\n## Candidate Cases (" +
         std::to_string(selected.size()) + ", in order)\n" + cases.dump(2);
}

std::string DecompositionText(const SessionState& session) {
  return ScenarioText(session) + "\n\n## Policies\n" +
         PoliciesText(session.policies) + "\n\n## Canvas Element Map\n" +
         EntityMapText(session);
}

// Card-level checks shared by realization and fallback output.
void CheckCards(std::span<const InsightCard> vignettes,
                const std::set<std::string>& policy_numbers,
                const std::set<int>& known_marks) {
  for (std::size_t i = 0; i < vignettes.size(); ++i) {
    ValidationReport report =
        ValidateInsight(vignettes[i], policy_numbers, known_marks);
    for (Violation& v : report) v.path = IndexPath("vignettes", i) + "." + v.path;
    RequireValid(report, "vignettes");
  }
}

std::optional<std::vector<InsightCard>> FallbackMonolithic(
    SessionState& session, const Gateway& gateway, int k, Json& diagnostics) {
  int max = std::max(1, k);
  PromptContext ctx{{"SCENARIO_CONTEXT", ScenarioText(session)},
                    {"VIGNETTE_COUNT_MIN", std::to_string(std::min(3, max))},
                    {"VIGNETTE_COUNT_MAX", std::to_string(max)}};
  ChatRequest request;
  request.kind = CallKind::kStoryRealization;
  request.system_prompt = RenderPrompt(PromptId::kMonolithicTest, ctx);
  request.user_turns.push_back(TextPart{DecompositionText(session)});
  request.schema_id = std::string(ToString(SchemaId::kFallbackVignettes));

  std::set<std::string> numbers = PolicyNumbers(session.policies);
  std::set<int> marks = KnownMarks(session);
  AskOutcome outcome;
  auto cards = AskValidated(
      gateway, session, std::move(request),
      [&](const std::string& raw) {
        std::vector<InsightCard> v = ParseRealization(raw).vignettes;
        if (v.empty()) throw SchemaError("$.vignettes", "no vignettes");
        CheckCards(v, numbers, marks);
        return v;
      },
      /*reasks=*/1, &outcome);
  if (!cards) diagnostics["fallbackViolation"] = outcome.last_violation;
  return cards;
}

}  // namespace

ExpectedOutcome ExpectedOutcomeFor(std::span<const BoundaryType> boundaries) {
  bool deny = false;
  for (BoundaryType b : boundaries) {
    if (b == BoundaryType::kAmbiguous) return ExpectedOutcome::kAmbiguous;
    deny = deny || b == BoundaryType::kJustOutside ||
           b == BoundaryType::kClearlyOutside;
  }
  return deny ? ExpectedOutcome::kDeny : ExpectedOutcome::kAllow;
}

std::vector<std::string> GroundingNames(const SessionState& session) {
  std::vector<std::string> names;
  auto add = [&](const std::string& s) {
    if (!s.empty() && std::find(names.begin(), names.end(), s) == names.end()) {
      names.push_back(s);
    }
  };
  for (const Policy& p : session.policies) {
    add(p.subject);
    add(p.resource);
  }
  for (const Entity& e : session.entities) {
    if (e.role == SemanticRole::kSubject || e.role == SemanticRole::kResource) {
      add(e.label);
    }
  }
  return names;
}

ValidationReport ValidateSchemas(std::span<const PolicySchema> schemas,
                                 std::span<const Policy> policies,
                                 std::span<const std::string> grounding_names) {
  ValidationReport report;
  if (schemas.empty()) report.push_back({"schemas", "no schemas returned"});
  std::set<std::string> numbers = PolicyNumbers(policies);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < schemas.size(); ++i) {
    const PolicySchema& s = schemas[i];
    std::string path = IndexPath("schemas", i);
    if (numbers.count(s.policy_number) == 0) {
      report.push_back({path + ".policyNumber", "unknown policy " + s.policy_number});
    }
    if (!seen.insert(s.policy_number).second) {
      report.push_back({path + ".policyNumber", "duplicate schema for " + s.policy_number});
    }
    std::size_t n = s.variable_factors.size();
    if (n < 2 || n > 5) {
      report.push_back({path + ".variableFactors",
                        "needs 2 to 5 variable factors, got " + std::to_string(n)});
    }
    std::set<std::string> names;
    for (std::size_t j = 0; j < n; ++j) {
      std::string fp = IndexPath(path + ".variableFactors", j);
      if (!names.insert(s.variable_factors[j].name).second) {
        report.push_back({fp + ".name", "duplicate factor " + s.variable_factors[j].name});
      }
      CheckFactor(report, fp, s.variable_factors[j], grounding_names);
    }
  }
  return report;
}

std::string CaseId(const std::string& policy_number,
                   std::span<const Assignment> assignments) {
  std::vector<const Assignment*> varied;
  for (const Assignment& a : assignments) {
    if (!a.value.is_baseline) varied.push_back(&a);
  }
  if (varied.empty()) return policy_number + "|baseline";
  std::sort(varied.begin(), varied.end(),
            [](const Assignment* a, const Assignment* b) { return a->factor < b->factor; });
  std::string id = policy_number;
  for (const Assignment* a : varied) id += "|" + a->factor + "=" + a->value.value;
  return id;
}

std::vector<CandidateCase> EnumerateCandidates(
    std::span<const PolicySchema> schemas) {
  std::vector<CandidateCase> out;
  for (const PolicySchema& s : schemas) {
    const auto& factors = s.variable_factors;
    std::vector<const FactorValue*> base;
    for (const VariableFactor& f : factors) base.push_back(&f.policy_value);

    std::vector<CandidateCase> cases;
    cases.push_back(MakeCase(s, base));
    for (std::size_t i = 0; i < factors.size(); ++i) {
      for (const FactorValue& a : factors[i].alternatives) {
        std::vector<const FactorValue*> v = base;
        v[i] = &a;
        cases.push_back(MakeCase(s, v));
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> hinted, rest;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      for (std::size_t j = i + 1; j < factors.size(); ++j) {
        (Hinted(factors[i], factors[j]) ? hinted : rest).emplace_back(i, j);
      }
    }
    hinted.insert(hinted.end(), rest.begin(), rest.end());
    for (auto [i, j] : hinted) {
      for (const FactorValue& a : factors[i].alternatives) {
        for (const FactorValue& b : factors[j].alternatives) {
          if (cases.size() >= kCandidateCapPerPolicy) break;
          std::vector<const FactorValue*> v = base;
          v[i] = &a;
          v[j] = &b;
          cases.push_back(MakeCase(s, v));
        }
      }
    }
    if (cases.size() > kCandidateCapPerPolicy) cases.resize(kCandidateCapPerPolicy);
    for (CandidateCase& c : cases) out.push_back(std::move(c));
  }
  return out;
}

std::string PrimaryDimension(const CandidateCase& c) {
  std::vector<const Assignment*> varied = VariedAssignments(c);
  if (varied.empty()) return "none";
  // Schema order, which is the order of `assignments`.
  for (const Assignment& a : c.assignments) {
    if (!a.value.is_baseline) return std::string(ToString(a.dimension));
  }
  return "none";
}

double AmbiguityScore(const CandidateCase& c, const PolicySchema& schema) {
  if (c.expected_outcome == ExpectedOutcome::kAmbiguous) return 1.0;
  std::vector<std::string> texts;
  for (const std::string& s : schema.analysis.identified_ambiguities) {
    texts.push_back(Normalize(s));
  }
  for (const std::string& s : schema.analysis.under_specified_conditions) {
    texts.push_back(Normalize(s));
  }
  for (const Assignment* a : VariedAssignments(c)) {
    std::vector<std::string> terms = {Normalize(a->factor),
                                      Normalize(a->value.value)};
    for (const VariableFactor& f : schema.variable_factors) {
      if (f.name == a->factor) terms.push_back(Normalize(f.policy_value.value));
    }
    for (const std::string& t : texts) {
      for (const std::string& term : terms) {
        if (HasPhrase(t, term)) return 0.5;
      }
    }
  }
  return 0.0;
}

double BoundaryProximity(const CandidateCase& c) {
  double best = -1;
  for (const Assignment& a : c.assignments) {
    double v = 0;
    switch (a.value.boundary_type) {
      case BoundaryType::kBaseline: continue;
      case BoundaryType::kAmbiguous:
      case BoundaryType::kJustOutside: v = 1.0; break;
      case BoundaryType::kJustInside: v = 0.6; break;
      case BoundaryType::kClearlyOutside: v = 0.3; break;
    }
    best = std::max(best, v);
  }
  return best < 0 ? 0.1 : best;
}

double ConflictPotential(const CandidateCase& c, const PolicySchema& schema) {
  if (schema.analysis.conflicts_with_policies.empty()) return 0.0;
  for (const Assignment* a : VariedAssignments(c)) {
    if (a->dimension == Dimension::kSubject ||
        a->dimension == Dimension::kResource) {
      return 1.0;
    }
  }
  return 0.5;
}

double CoverageDiversity(const CandidateCase& c,
                         std::span<const CandidateCase> selected) {
  std::string dim = PrimaryDimension(c);
  double shared = 0;
  for (const CandidateCase& s : selected) {
    if (s.source_policy == c.source_policy) shared += 1;
    if (PrimaryDimension(s) == dim) shared += 1;
  }
  double denom = 2.0 * static_cast<double>(std::max<std::size_t>(1, selected.size()));
  return std::clamp(1.0 - shared / denom, 0.0, 1.0);
}

double Novelty(const CandidateCase& c, std::span<const CandidateCase> selected) {
  std::vector<const Assignment*> varied = VariedAssignments(c);
  if (varied.empty()) return 0.0;
  std::size_t fresh = 0;
  for (const Assignment* a : varied) {
    bool seen = false;
    for (const CandidateCase& s : selected) {
      const Assignment* b = FindAssignment(s, a->factor);
      seen = seen || (b && b->value.value == a->value.value);
    }
    if (!seen) ++fresh;
  }
  return static_cast<double>(fresh) / static_cast<double>(varied.size());
}

double WeightedTotal(const ScoreBreakdown& s) {
  return kWeightAmbiguity * s.ambiguity +
         kWeightBoundaryProximity * s.boundary_proximity +
         kWeightConflictPotential * s.conflict_potential +
         kWeightCoverageDiversity * s.coverage_diversity +
         kWeightNovelty * s.novelty;
}

SchemaIndex IndexSchemas(std::span<const PolicySchema> schemas) {
  SchemaIndex index;
  for (const PolicySchema& s : schemas) index.emplace(s.policy_number, &s);
  return index;
}

ScoreBreakdown ScoreCandidate(const CandidateCase& c, const SchemaIndex& schemas,
                              std::span<const CandidateCase> selected) {
  ScoreBreakdown s;
  auto it = schemas.find(c.source_policy);
  if (it != schemas.end()) {
    s.ambiguity = AmbiguityScore(c, *it->second);
    s.conflict_potential = ConflictPotential(c, *it->second);
  } else if (c.expected_outcome == ExpectedOutcome::kAmbiguous) {
    s.ambiguity = 1.0;
  }
  s.boundary_proximity = BoundaryProximity(c);
  s.coverage_diversity = CoverageDiversity(c, selected);
  s.novelty = Novelty(c, selected);
  s.total = WeightedTotal(s);
  return s;
}

std::vector<CandidateCase> SelectGreedy(std::vector<CandidateCase> candidates,
                                        const SchemaIndex& schemas, int k) {
  std::vector<CandidateCase> selected;
  std::size_t want = k <= 0 ? 0 : std::min<std::size_t>(k, candidates.size());
  while (selected.size() < want) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      candidates[i].score = ScoreCandidate(candidates[i], schemas, selected);
      if (i == 0) continue;
      double diff = candidates[i].score.total - candidates[best].score.total;
      if (diff > kSelectionTieTolerance ||
          (diff >= -kSelectionTieTolerance &&
           candidates[i].case_id < candidates[best].case_id)) {
        best = i;
      }
    }
    selected.push_back(std::move(candidates[best]));
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return selected;
}

std::vector<InsightCard> CheckRealization(
    std::span<const InsightCard> vignettes,
    std::span<const CandidateCase> selected,
    const std::set<std::string>& policy_numbers,
    const std::set<int>& known_marks) {
  if (vignettes.size() != selected.size()) {
    throw SchemaError("$.vignettes", "expected " + std::to_string(selected.size()) +
                                         " vignettes, got " +
                                         std::to_string(vignettes.size()));
  }
  CheckCards(vignettes, policy_numbers, known_marks);
  for (std::size_t i = 0; i < vignettes.size(); ++i) {
    const InsightCard& v = vignettes[i];
    const CandidateCase& c = selected[i];
    std::string path = IndexPath("$.vignettes", i);
    if (v.expected_outcome != c.expected_outcome) {
      throw SchemaError(path + ".expectedOutcome",
                        "case " + c.case_id + " is " +
                            std::string(ToString(c.expected_outcome)) +
                            "; the outcome must not change");
    }
    if (*v.relevant_policies != std::vector<std::string>{c.source_policy}) {
      throw SchemaError(path + ".relevantPolicies",
                        "must be [\"" + c.source_policy + "\"]");
    }
  }
  return std::vector<InsightCard>(vignettes.begin(), vignettes.end());
}

TestRun RunTestPipeline(SessionState& session, const Gateway& gateway, int k) {
  if (session.stage != Stage::kTest) {
    Fail(ErrorCode::kStageError, "vignettes need the test stage");
  }
  if (session.policies.empty()) {
    Fail(ErrorCode::kStageError, "there are no policies to test");
  }
  k = std::max(1, k);
  TestRun run;
  Json& diag = run.diagnostics;
  diag["k"] = k;

  ChatRequest request;
  request.kind = CallKind::kFactorDecomposition;
  request.system_prompt = std::string(PromptText(PromptId::kFactorDecomposition));
  request.user_turns.push_back(TextPart{DecompositionText(session)});
  request.schema_id = std::string(ToString(SchemaId::kDecomposition));

  std::vector<InsightCard> cards;
  std::optional<std::vector<PolicySchema>> schemas;
  try {
    schemas = ParseDecomposition(
                  gateway.Invoke(request, session.session_id, session.call_log))
                  .schemas;
  } catch (const SchemaError& e) {
    run.fallback_reason = std::string("decomposition rejected: ") + e.what();
  }
  if (schemas) {
    ValidationReport report =
        ValidateSchemas(*schemas, session.policies, GroundingNames(session));
    if (!report.empty()) {
      Json violations = Json::array();
      for (const Violation& v : report) violations.push_back(v.path + ": " + v.message);
      diag["violations"] = std::move(violations);
      run.fallback_reason = "decomposition invalid: " + Describe(report);
      schemas.reset();
    }
  }

  if (schemas) {
    SchemaIndex index = IndexSchemas(*schemas);
    std::vector<CandidateCase> candidates = EnumerateCandidates(*schemas);
    std::vector<CandidateCase> selected = SelectGreedy(candidates, index, k);
    Json all = Json::array();
    for (const CandidateCase& c : candidates) all.push_back(ToJson(c));
    diag["candidates"] = std::move(all);
    Json order = Json::array();
    for (const CandidateCase& c : selected) {
      order.push_back(Json{{"caseId", c.case_id}, {"score", ToJson(c.score)}});
    }
    diag["selectionOrder"] = std::move(order);

    ChatRequest realize;
    realize.kind = CallKind::kStoryRealization;
    realize.system_prompt = std::string(PromptText(PromptId::kStoryRealization));
    realize.user_turns.push_back(
        TextPart{RealizationText(session, selected, index)});
    realize.schema_id = std::string(ToString(SchemaId::kRealization));
    std::set<std::string> numbers = PolicyNumbers(session.policies);
    std::set<int> marks = KnownMarks(session);
    AskOutcome outcome;
    auto realized = AskValidated(
        gateway, session, std::move(realize),
        [&](const std::string& raw) {
          return CheckRealization(ParseRealization(raw).vignettes, selected,
                                  numbers, marks);
        },
        /*reasks=*/1, &outcome);
    if (realized) {
      cards = std::move(*realized);
    } else {
      run.fallback_reason = "realization rejected: " + outcome.last_violation;
    }
  }

  if (cards.empty()) {
    run.used_fallback = true;
    diag["fallback"] = run.fallback_reason;
    spdlog::warn("test pipeline falling back: {}", run.fallback_reason);
    auto fallback = FallbackMonolithic(session, gateway, k, diag);
    if (!fallback) {
      session.test_diagnostics = diag;
      session.status_note = "tests unavailable: " + run.fallback_reason;
      session.audit_log.push_back({"test_unavailable", run.fallback_reason});
      Fail(ErrorCode::kTestUnavailable,
           "no vignettes could be produced (" + run.fallback_reason + ")");
    }
    cards = std::move(*fallback);
  } else {
    diag["fallback"] = nullptr;
  }

  for (const InsightCard& old : session.vignettes.LiveCards()) {
    session.vignettes.Dismiss(old.id, "superseded by new test run");
  }
  int next = std::max(session.vignette_counter,
                      session.vignettes.MaxNumber(IssueType::kVignette));
  for (InsightCard& c : cards) {
    c.id = "vignette" + std::to_string(++next);
    c.is_accepted.reset();
  }
  session.vignette_counter = next;
  session.vignettes.Merge(cards);
  session.vignettes.RefreshDangling(KnownMarks(session));
  session.test_diagnostics = diag;
  session.status_note.clear();
  session.audit_log.push_back(
      {"test_run", std::to_string(cards.size()) + " vignettes" +
                       (run.used_fallback ? " (fallback)" : "")});
  run.vignettes = std::move(cards);
  return run;
}

Json ToJson(const TestRun& run) {
  return Json{{"vignettes", InsightsToJson(run.vignettes)},
              {"usedFallback", run.used_fallback},
              {"fallbackReason", run.fallback_reason},
              {"diagnostics", run.diagnostics}};
}

}  // namespace sbac
