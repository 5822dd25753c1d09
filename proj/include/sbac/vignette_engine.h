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

#ifndef SBAC_VIGNETTE_ENGINE_H_
#define SBAC_VIGNETTE_ENGINE_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sbac/llm_gateway.h"
#include "sbac/policy_model.h"
#include "sbac/session_state.h"
#include "sbac/vignette_types.h"

namespace sbac {

inline constexpr int kDefaultVignetteCount = 6;
inline constexpr std::size_t kCandidateCapPerPolicy = 40;
inline constexpr double kSelectionTieTolerance = 1e-12;

inline constexpr double kWeightAmbiguity = 0.25;
inline constexpr double kWeightBoundaryProximity = 0.20;
inline constexpr double kWeightConflictPotential = 0.20;
inline constexpr double kWeightCoverageDiversity = 0.20;
inline constexpr double kWeightNovelty = 0.15;

// Worst boundary wins: any ambiguous gives Ambiguous, else any just_outside
// or clearly_outside gives Deny, else Allow. `boundaries` must be non-empty.
ExpectedOutcome ExpectedOutcomeFor(std::span<const BoundaryType> boundaries);

// Names the decomposition may use for subject and resource alternatives.
std::vector<std::string> GroundingNames(const SessionState& session);

// Structural and grounding checks for a decomposition reply. Paths look
// like "schemas[0].variableFactors[1].alternatives".
ValidationReport ValidateSchemas(std::span<const PolicySchema> schemas,
                                 std::span<const Policy> policies,
                                 std::span<const std::string> grounding_names);

// Deterministic id: "policy1|baseline" or "policy1|a=x|b=y" (varied
// assignments sorted by factor name).
std::string CaseId(const std::string& policy_number,
                   std::span<const Assignment> assignments);

// Baseline, singles, then pairs (hinted pairs first), capped per policy by
// dropping pair cases from the end. Scores are left at zero.
std::vector<CandidateCase> EnumerateCandidates(
    std::span<const PolicySchema> schemas);

// Dimension of the first varied factor, or "none" for a baseline case.
std::string PrimaryDimension(const CandidateCase& c);

double AmbiguityScore(const CandidateCase& c, const PolicySchema& schema);
double BoundaryProximity(const CandidateCase& c);
double ConflictPotential(const CandidateCase& c, const PolicySchema& schema);
double CoverageDiversity(const CandidateCase& c,
                         std::span<const CandidateCase> selected);
double Novelty(const CandidateCase& c, std::span<const CandidateCase> selected);

// Weighted sum of the five components; `score.total` is ignored.
double WeightedTotal(const ScoreBreakdown& score);

using SchemaIndex = std::map<std::string, const PolicySchema*, std::less<>>;
SchemaIndex IndexSchemas(std::span<const PolicySchema> schemas);

ScoreBreakdown ScoreCandidate(const CandidateCase& c, const SchemaIndex& schemas,
                              std::span<const CandidateCase> selected);

// Picks min(k, n) cases one at a time, rescoring the remainder against the
// selection after every pick. Ties within kSelectionTieTolerance go to the
// smaller caseId. Each returned case carries its score at selection time.
std::vector<CandidateCase> SelectGreedy(std::vector<CandidateCase> candidates,
                                        const SchemaIndex& schemas, int k);

// Checks one realization reply against the selection. Throws SchemaError.
std::vector<InsightCard> CheckRealization(
    std::span<const InsightCard> vignettes,
    std::span<const CandidateCase> selected,
    const std::set<std::string>& policy_numbers,
    const std::set<int>& known_marks);

struct TestRun {
  std::vector<InsightCard> vignettes;  // with their final ids
  bool used_fallback = false;
  std::string fallback_reason;
  Json diagnostics = Json::object();
};

// The whole test stage: decomposition, enumeration, scoring, selection,
// realization, with the single-call fallback. Replaces the live vignettes.
// Throws Error(kStageError), Error(kTestUnavailable) or transport errors.
TestRun RunTestPipeline(SessionState& session, const Gateway& gateway, int k);

Json ToJson(const TestRun& run);

}  // namespace sbac

#endif  // SBAC_VIGNETTE_ENGINE_H_
