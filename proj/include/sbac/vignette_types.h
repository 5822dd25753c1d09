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

#ifndef SBAC_VIGNETTE_TYPES_H_
#define SBAC_VIGNETTE_TYPES_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbac/json_util.h"
#include "sbac/policy_model.h"

namespace sbac {

// Position of a test value relative to the policy boundary.
enum class BoundaryType {
  kBaseline,
  kJustInside,
  kJustOutside,
  kClearlyOutside,
  kAmbiguous,
};

inline constexpr BoundaryType kAllBoundaryTypes[] = {
    BoundaryType::kBaseline, BoundaryType::kJustInside,
    BoundaryType::kJustOutside, BoundaryType::kClearlyOutside,
    BoundaryType::kAmbiguous};

std::string_view ToString(BoundaryType type);
std::optional<BoundaryType> BoundaryTypeFromString(std::string_view s);

enum class Dimension { kSubject, kResource, kAction, kContext };

std::string_view ToString(Dimension dimension);
std::optional<Dimension> DimensionFromString(std::string_view s);

struct FactorValue {
  std::string value;
  std::string label;
  bool is_baseline = false;
  BoundaryType boundary_type = BoundaryType::kBaseline;

  bool operator==(const FactorValue&) const = default;
};

struct VariableFactor {
  std::string name;
  Dimension dimension = Dimension::kContext;
  FactorValue policy_value;
  std::vector<FactorValue> alternatives;
  std::string rationale;
  std::vector<std::string> interaction_hints;

  bool operator==(const VariableFactor&) const = default;
};

struct PolicyAnalysis {
  std::vector<std::string> identified_ambiguities;
  std::vector<std::string> identified_risks;
  std::vector<std::string> under_specified_conditions;
  std::vector<std::string> conflicts_with_policies;

  bool operator==(const PolicyAnalysis&) const = default;
};

struct PolicySchema {
  std::string policy_number;
  std::string explanation;
  Json fixed_factors = Json::object();  // name -> string, in model order
  std::vector<VariableFactor> variable_factors;
  PolicyAnalysis analysis;

  bool operator==(const PolicySchema&) const = default;
};

struct Assignment {
  std::string factor;
  Dimension dimension = Dimension::kContext;
  FactorValue value;

  bool operator==(const Assignment&) const = default;
};

struct ScoreBreakdown {
  double ambiguity = 0;
  double boundary_proximity = 0;
  double conflict_potential = 0;
  double coverage_diversity = 0;
  double novelty = 0;
  double total = 0;

  bool operator==(const ScoreBreakdown&) const = default;
};

struct CandidateCase {
  std::string case_id;
  std::string source_policy;
  // One entry per variable factor of the source schema, in schema order.
  std::vector<Assignment> assignments;
  std::vector<std::string> varied_factors;
  ExpectedOutcome expected_outcome = ExpectedOutcome::kAllow;
  ScoreBreakdown score;
  std::string diagnostics;

  bool operator==(const CandidateCase&) const = default;
};

Json ToJson(const FactorValue& value);
Json ToJson(const VariableFactor& factor);
Json ToJson(const PolicySchema& schema);
Json ToJson(const ScoreBreakdown& score);
Json ToJson(const CandidateCase& candidate);

PolicySchema PolicySchemaFromJson(const Json& value, const std::string& path,
                                  UnknownFields mode);
std::vector<PolicySchema> PolicySchemasFromJson(const Json& value,
                                                const std::string& path,
                                                UnknownFields mode);

}  // namespace sbac

#endif  // SBAC_VIGNETTE_TYPES_H_
