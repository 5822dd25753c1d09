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

#include "sbac/vignette_types.h"

#include "sbac/errors.h"

namespace sbac {
namespace {

FactorValue FactorValueFromJson(const Json& value, const std::string& path,
                                UnknownFields mode) {
  ObjectReader r(value, path);
  FactorValue v;
  v.value = r.RequiredNonEmptyString("value");
  v.label = r.RequiredString("label");
  v.is_baseline = r.RequiredBool("isBaseline");
  std::string type = r.RequiredString("boundaryType");
  std::optional<BoundaryType> parsed = BoundaryTypeFromString(type);
  if (!parsed) {
    throw SchemaError(r.PathOf("boundaryType"),
                      "unknown boundary type \"" + type + "\"");
  }
  v.boundary_type = *parsed;
  r.Finish(mode);
  return v;
}

VariableFactor VariableFactorFromJson(const Json& value,
                                      const std::string& path,
                                      UnknownFields mode) {
  ObjectReader r(value, path);
  VariableFactor f;
  f.name = r.RequiredNonEmptyString("name");
  std::string dim = r.RequiredString("dimension");
  std::optional<Dimension> parsed = DimensionFromString(dim);
  if (!parsed) {
    throw SchemaError(r.PathOf("dimension"),
                      "unknown dimension \"" + dim + "\"");
  }
  f.dimension = *parsed;
  f.policy_value =
      FactorValueFromJson(r.Required("policyValue"), r.PathOf("policyValue"),
                          mode);
  const Json& alts = r.RequiredArray("alternatives");
  for (std::size_t i = 0; i < alts.size(); ++i) {
    f.alternatives.push_back(
        FactorValueFromJson(alts[i], IndexPath(r.PathOf("alternatives"), i),
                            mode));
  }
  f.rationale = r.RequiredString("rationale");
  if (auto hints = r.OptionalStringArray("interactionHints")) {
    f.interaction_hints = std::move(*hints);
  }
  r.Finish(mode);
  return f;
}

}  // namespace

std::string_view ToString(BoundaryType type) {
  switch (type) {
    case BoundaryType::kBaseline: return "baseline";
    case BoundaryType::kJustInside: return "just_inside";
    case BoundaryType::kJustOutside: return "just_outside";
    case BoundaryType::kClearlyOutside: return "clearly_outside";
    case BoundaryType::kAmbiguous: return "ambiguous";
  }
  return "baseline";
}

std::optional<BoundaryType> BoundaryTypeFromString(std::string_view s) {
  for (BoundaryType t : kAllBoundaryTypes) {
    if (ToString(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view ToString(Dimension dimension) {
  switch (dimension) {
    case Dimension::kSubject: return "subject";
    case Dimension::kResource: return "resource";
    case Dimension::kAction: return "action";
    case Dimension::kContext: return "context";
  }
  return "context";
}

std::optional<Dimension> DimensionFromString(std::string_view s) {
  if (s == "subject") return Dimension::kSubject;
  if (s == "resource") return Dimension::kResource;
  if (s == "action") return Dimension::kAction;
  if (s == "context") return Dimension::kContext;
  return std::nullopt;
}

Json ToJson(const FactorValue& value) {
  return Json{{"value", value.value},
              {"label", value.label},
              {"isBaseline", value.is_baseline},
              {"boundaryType", ToString(value.boundary_type)}};
}

Json ToJson(const VariableFactor& factor) {
  Json alts = Json::array();
  for (const FactorValue& v : factor.alternatives) alts.push_back(ToJson(v));
  Json out = Json{{"name", factor.name},
                  {"dimension", ToString(factor.dimension)},
                  {"policyValue", ToJson(factor.policy_value)},
                  {"alternatives", std::move(alts)},
                  {"rationale", factor.rationale}};
  if (!factor.interaction_hints.empty()) {
    out["interactionHints"] = factor.interaction_hints;
  }
  return out;
}

Json ToJson(const PolicySchema& schema) {
  Json factors = Json::array();
  for (const VariableFactor& f : schema.variable_factors) {
    factors.push_back(ToJson(f));
  }
  return Json{
      {"policyNumber", schema.policy_number},
      {"explanation", schema.explanation},
      {"fixedFactors", schema.fixed_factors},
      {"variableFactors", std::move(factors)},
      {"policyAnalysis",
       Json{{"identifiedAmbiguities", schema.analysis.identified_ambiguities},
            {"identifiedRisks", schema.analysis.identified_risks},
            {"underSpecifiedConditions",
             schema.analysis.under_specified_conditions},
            {"conflictsWithPolicies",
             schema.analysis.conflicts_with_policies}}}};
}

Json ToJson(const ScoreBreakdown& score) {
  return Json{{"ambiguity", score.ambiguity},
              {"boundaryProximity", score.boundary_proximity},
              {"conflictPotential", score.conflict_potential},
              {"coverageDiversity", score.coverage_diversity},
              {"novelty", score.novelty},
              {"total", score.total}};
}

Json ToJson(const CandidateCase& candidate) {
  Json assignments = Json::object();
  for (const Assignment& a : candidate.assignments) {
    Json v = ToJson(a.value);
    v["dimension"] = ToString(a.dimension);
    assignments[a.factor] = std::move(v);
  }
  return Json{{"caseId", candidate.case_id},
              {"sourcePolicy", candidate.source_policy},
              {"assignments", std::move(assignments)},
              {"variedFactors", candidate.varied_factors},
              {"expectedOutcome", ToString(candidate.expected_outcome)},
              {"scoreBreakdown", ToJson(candidate.score)},
              {"diagnostics", candidate.diagnostics}};
}

PolicySchema PolicySchemaFromJson(const Json& value, const std::string& path,
                                  UnknownFields mode) {
  ObjectReader r(value, path);
  PolicySchema s;
  s.policy_number = r.RequiredNonEmptyString("policyNumber");
  s.explanation = r.RequiredString("explanation");
  if (const Json* fixed = r.Optional("fixedFactors")) {
    if (!fixed->is_object()) {
      throw SchemaError(r.PathOf("fixedFactors"), "expected an object");
    }
    for (auto it = fixed->begin(); it != fixed->end(); ++it) {
      if (!it.value().is_string()) {
        throw SchemaError(r.PathOf("fixedFactors") + "." + it.key(),
                          "expected a string");
      }
    }
    s.fixed_factors = *fixed;
  }
  const Json& factors = r.RequiredArray("variableFactors");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    s.variable_factors.push_back(VariableFactorFromJson(
        factors[i], IndexPath(r.PathOf("variableFactors"), i), mode));
  }
  ObjectReader a(r.Required("policyAnalysis"), r.PathOf("policyAnalysis"));
  s.analysis.identified_ambiguities =
      a.RequiredStringArray("identifiedAmbiguities");
  s.analysis.identified_risks = a.RequiredStringArray("identifiedRisks");
  s.analysis.under_specified_conditions =
      a.RequiredStringArray("underSpecifiedConditions");
  s.analysis.conflicts_with_policies =
      a.RequiredStringArray("conflictsWithPolicies");
  a.Finish(mode);
  r.Finish(mode);
  return s;
}

std::vector<PolicySchema> PolicySchemasFromJson(const Json& value,
                                                const std::string& path,
                                                UnknownFields mode) {
  if (!value.is_array()) throw SchemaError(path, "expected an array");
  std::vector<PolicySchema> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(PolicySchemaFromJson(value[i], IndexPath(path, i), mode));
  }
  return out;
}

}  // namespace sbac
