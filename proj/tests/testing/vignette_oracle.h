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

#ifndef SBAC_TESTS_TESTING_VIGNETTE_ORACLE_H_
#define SBAC_TESTS_TESTING_VIGNETTE_ORACLE_H_

// Independent re-implementations of the vignette arithmetic, written from
// the rules rather than from the engine, plus a random schema generator.

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "sbac/vignette_types.h"

namespace sbac::testing {

// Severity ranking: inside values rank 0, outside values 1, ambiguous 2.
ExpectedOutcome OracleOutcome(const std::vector<BoundaryType>& boundaries);

// 1 + sum(a_i) + sum over pairs a_i * a_j, capped at 40.
std::size_t ClosedFormCount(const PolicySchema& schema);

struct OracleScore {
  double ambiguity = 0;
  double proximity = 0;
  double conflict = 0;
  double diversity = 0;
  double novelty = 0;
  double total = 0;
};

OracleScore ScoreByHand(const CandidateCase& c, const PolicySchema* schema,
                        const std::vector<CandidateCase>& selected);

// Case ids in pick order.
std::vector<std::string> OracleSelect(std::vector<CandidateCase> pool,
                                      const std::vector<PolicySchema>& schemas,
                                      int k);

// One to three policies, two to five factors, two to four alternatives.
std::vector<PolicySchema> RandomSchemas(std::mt19937_64& rng);

}  // namespace sbac::testing

#endif  // SBAC_TESTS_TESTING_VIGNETTE_ORACLE_H_
