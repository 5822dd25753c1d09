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

// Acceptance suite. One line per criterion, scripted and replay transports
// only. Exit status is non-zero when any criterion fails.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sbac/clarify_engine.h"
#include "sbac/engine_support.h"
#include "sbac/errors.h"
#include "sbac/mark_model.h"
#include "sbac/prompts.h"
#include "sbac/responses.h"
#include "sbac/ripple_engine.h"
#include "sbac/session_service.h"
#include "sbac/vignette_engine.h"
#include "testing/journeys.h"
#include "testing/office_fixture.h"
#include "testing/vignette_oracle.h"

namespace sbac {
namespace {

// Pinned tolerances and limits.
constexpr double kWeightTolerance = 1e-9;
constexpr double kFastCriterionSeconds = 1.0;
constexpr int kWeightVectors = 1000;
constexpr int kGreedySets = 100;

// Collects failures for one criterion; the first few are printed.
class Check {
 public:
  void That(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty(); }
  std::string Detail() const {
    std::string out;
    for (std::size_t i = 0; i < failures_.size() && i < 3; ++i) {
      out += (i ? "; " : "") + failures_[i];
    }
    if (failures_.size() > 3) out += " (+" + std::to_string(failures_.size() - 3) + " more)";
    return out;
  }

 private:
  std::vector<std::string> failures_;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::vector<CallKind> Kinds(const CallLog& log) {
  std::vector<CallKind> out;
  for (const CallRecord& r : log) out.push_back(r.kind);
  return out;
}

bool IsFastKind(CallKind k) {
  return k == CallKind::kIntentClassification || k == CallKind::kPolicyPropagation ||
         k == CallKind::kInsightPropagation;
}

// ---------------------------------------------------------------------------

void OutcomeTruthTable(Check& c) {
  auto start = std::chrono::steady_clock::now();
  using B = BoundaryType;
  using O = ExpectedOutcome;
  const B order[] = {B::kBaseline, B::kJustInside, B::kJustOutside, B::kClearlyOutside,
                     B::kAmbiguous};
  const O singles[] = {O::kAllow, O::kAllow, O::kDeny, O::kDeny, O::kAmbiguous};
  // Upper triangle, row by row, in the order above.
  const O pairs[] = {O::kAllow, O::kAllow, O::kDeny, O::kDeny, O::kAmbiguous,
                     O::kAllow, O::kDeny,  O::kDeny, O::kAmbiguous,
                     O::kDeny,  O::kDeny,  O::kAmbiguous,
                     O::kDeny,  O::kAmbiguous,
                     O::kAmbiguous};
  int rows = 0;
  for (int i = 0; i < 5; ++i) {
    std::vector<B> one = {order[i]};
    c.That(ExpectedOutcomeFor(one) == singles[i], "single " + std::string(ToString(order[i])));
    ++rows;
  }
  int p = 0;
  for (int i = 0; i < 5; ++i) {
    for (int j = i; j < 5; ++j, ++p) {
      std::vector<B> ab = {order[i], order[j]}, ba = {order[j], order[i]};
      bool ok = ExpectedOutcomeFor(ab) == pairs[p] && ExpectedOutcomeFor(ba) == pairs[p] &&
                testing::OracleOutcome(ab) == pairs[p];
      c.That(ok, "pair " + std::string(ToString(order[i])) + "+" +
                     std::string(ToString(order[j])));
      ++rows;
    }
  }
  c.That(rows == 20, "expected 20 rows");
  c.That(Seconds(start) < kFastCriterionSeconds, "slower than 1 s");
}

void ScoringWeights(Check& c) {
  const double want[] = {0.25, 0.20, 0.20, 0.20, 0.15};
  double ScoreBreakdown::*fields[] = {
      &ScoreBreakdown::ambiguity, &ScoreBreakdown::boundary_proximity,
      &ScoreBreakdown::conflict_potential, &ScoreBreakdown::coverage_diversity,
      &ScoreBreakdown::novelty};
  for (int i = 0; i < 5; ++i) {
    ScoreBreakdown unit;
    unit.*fields[i] = 1;
    c.That(std::abs(WeightedTotal(unit) - want[i]) <= kWeightTolerance,
           "unit weight " + std::to_string(i));
  }
  std::mt19937_64 rng(20261);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < kWeightVectors; ++n) {
    ScoreBreakdown s;
    double expect = 0;
    for (int i = 0; i < 5; ++i) {
      s.*fields[i] = u(rng);
      expect += want[i] * (s.*fields[i]);
    }
    double got = WeightedTotal(s);
    c.That(std::abs(got - expect) <= kWeightTolerance, "vector " + std::to_string(n));
    for (int i = 0; i < 5; ++i) {
      ScoreBreakdown hi = s;
      hi.*fields[i] = s.*fields[i] + (1 - s.*fields[i]) * u(rng) + 1e-6;
      c.That(WeightedTotal(hi) > got, "monotonicity at vector " + std::to_string(n));
    }
  }
}

void EnumerationCount(Check& c) {
  auto start = std::chrono::steady_clock::now();
  std::vector<PolicySchema> worked = {
      PolicySchemaFromJson(testing::WorkedSchemaJson(), "s", UnknownFields::kReject)};
  std::size_t n = EnumerateCandidates(worked).size();
  c.That(n == 1 + 6 + 9, "worked schema gave " + std::to_string(n));
  std::mt19937_64 rng(404);
  for (int round = 0; round < 200; ++round) {
    std::vector<PolicySchema> schemas = testing::RandomSchemas(rng);
    std::size_t want = 0;
    for (const PolicySchema& s : schemas) want += testing::ClosedFormCount(s);
    std::size_t got = EnumerateCandidates(schemas).size();
    c.That(got == want, "round " + std::to_string(round) + ": " + std::to_string(got) +
                            " vs " + std::to_string(want));
  }
  c.That(Seconds(start) < kFastCriterionSeconds, "slower than 1 s");
}

void GreedySelection(Check& c) {
  std::mt19937_64 rng(31415);
  for (int set = 0; set < kGreedySets; ++set) {
    std::vector<PolicySchema> schemas = testing::RandomSchemas(rng);
    std::vector<CandidateCase> cases = EnumerateCandidates(schemas);
    int k = 1 + set % 6;
    SchemaIndex index = IndexSchemas(schemas);
    std::vector<CandidateCase> first = SelectGreedy(cases, index, k);
    std::vector<std::string> ids;
    Json dump1 = Json::array();
    for (const CandidateCase& x : first) {
      ids.push_back(x.case_id);
      dump1.push_back(ToJson(x));
    }
    c.That(ids == testing::OracleSelect(cases, schemas, k), "set " + std::to_string(set));
    Json dump2 = Json::array();
    for (const CandidateCase& x : SelectGreedy(cases, index, k)) dump2.push_back(ToJson(x));
    c.That(dump1.dump() == dump2.dump(), "repeat differs on set " + std::to_string(set));
  }
}

Json ReadData(const std::string& name) {
  std::ifstream in(std::string(SBAC_TEST_DATA_DIR) + "/" + name);
  std::stringstream text;
  text << in.rdbuf();
  return Json::parse(text.str());
}

void RippleOracle(Check& c) {
  Json input = ReadData("ripple_input.json");
  std::vector<Policy> before =
      PoliciesFromJson(input["policies"], "policies", UnknownFields::kReject);
  c.That(before.size() == 5, "fixture has 5 policies");
  PolicyEdit rename = MakeEdit(before, "policy1", PolicyField::kResource, "Medication Cabinet");

  // Hand-derived: every whole-token "Pharmacy Cabinet" becomes the new name;
  // the plural in policy4 is a different token.
  std::vector<Policy> want = before;
  want[0].resource = "Medication Cabinet";
  want[0].description = "Nurse can open Medication Cabinet during a shift";
  want[0].explanation = "Arrow from Nurse to Medication Cabinet labeled open";
  want[1].resource = "Medication Cabinet";
  want[1].description = "Pharmacist can restock Medication Cabinet on weekday mornings";
  want[2].context = "When the Medication Cabinet alarm sounds";
  want[2].explanation = "Note about the Medication Cabinet's alarm";

  RippleResult reference = ReferenceOracle(rename, before);
  c.That(reference.policies == want, "reference differs from the hand-derived result");
  c.That(reference.summary ==
             "Renamed 'Pharmacy Cabinet' to 'Medication Cabinet' across 3 policies",
         "summary: " + reference.summary);

  auto sc = testing::MakeScripted();
  sc.script->Enqueue(Json{{"hasRipple", true}, {"summary", "renamed"},
                          {"policies", PoliciesToJson(want)}}
                         .dump(),
                     CallKind::kPolicyPropagation);
  CallLog log;
  RippleResult model = PropagatePolicies(rename, before, *sc.gateway, "acc", log);
  c.That(model.policies == reference.policies, "model path differs from the reference");
  c.That(model.source == "model" && !model.divergence, "model output not accepted");
  c.That(log.size() == 1 && log[0].tier == ModelTier::kFast, "expected one fast call");

  CallLog none;
  PolicyEdit text = MakeEdit(before, "policy4", PolicyField::kDescription, "Audit trail");
  RippleResult fast = PropagatePolicies(text, before, *sc.gateway, "acc", none);
  c.That(none.empty() && fast.source == "fast_path", "text_only edit called the model");

  PolicyEdit action = MakeEdit(before, "policy2", PolicyField::kAction, "inspect");
  std::vector<Policy> shorter = ApplyFieldEdit(action, before);
  shorter.resize(3);
  sc.script->Enqueue(Json{{"hasRipple", true}, {"summary", "s"},
                          {"policies", PoliciesToJson(shorter)}}
                         .dump());
  CallLog one;
  RippleResult kept = PropagatePolicies(action, before, *sc.gateway, "acc", one);
  c.That(kept.degraded && kept.policies == ApplyFieldEdit(action, before),
         "short list did not keep the original array");
}

void MarkerExactlyOnce(Check& c) {
  std::vector<Policy> policies = testing::OfficePolicies();
  PolicyEdit edit = MakeEdit(policies, "policy2", PolicyField::kContext, "Business hours");
  RippleResult phase1;
  phase1.has_ripple = true;
  phase1.summary = "context narrowed";
  phase1.policies = ApplyFieldEdit(edit, policies);

  auto sc = testing::MakeScripted();
  std::vector<InsightCard> cards = testing::OfficeInsights();
  std::string marker = EditMarker(ChangeSummary(edit));
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<InsightCard> reply = cards;
    for (InsightCard& card : reply) card.heading += " [Updated]";
    sc.script->Enqueue(Json{{"hasChanges", true}, {"summary", "x"},
                            {"insights", InsightsToJson(reply)}}
                           .dump());
    CallLog log;
    cards = PropagateInsights(edit, phase1, phase1.policies, cards, *sc.gateway, "acc", log)
                .insights;
    const InsightCard& risk = cards[0];
    std::size_t first = risk.heading.find(" [Updated]");
    c.That(first != std::string::npos, "risk1 not marked on pass " + std::to_string(pass));
    c.That(risk.heading.find(" [Updated]", first + 1) == std::string::npos,
           "second [Updated] on pass " + std::to_string(pass));
    std::size_t m = risk.description.find(marker);
    c.That(m != std::string::npos && risk.description.find(marker, m + 1) == std::string::npos,
           "edit marker count on pass " + std::to_string(pass));
    c.That(cards[1] == testing::OfficeInsights()[1], "unrelated card changed");
  }
}

void RoutingMatrix(Check& c) {
  struct Row {
    const char* intent;
    Route route;
    std::vector<CallKind> calls;
  };
  const std::vector<Row> rows = {
      {"understand", Route::kTerminal, {CallKind::kIntentClassification}},
      {"correct", Route::kTerminal, {CallKind::kIntentClassification}},
      {"fix", Route::kDeepFix, {CallKind::kIntentClassification, CallKind::kDeepResolution}},
      {"explore", Route::kDeepExplore,
       {CallKind::kIntentClassification, CallKind::kDeepResolution}},
      {"unclassified", Route::kDeepFix,
       {CallKind::kIntentClassification, CallKind::kDeepResolution}}};
  for (const Row& row : rows) {
    auto sc = testing::MakeScripted();
    // An off-schema reply is how a classification ends up unclassified.
    std::string reply = std::string(row.intent) == "unclassified"
                            ? "not sure what the user wants"
                            : testing::ClassificationReply(row.intent);
    sc.script->Enqueue(reply)
        .Enqueue(testing::FixResolutionReply(false));
    SessionState s = testing::AnalyzedOfficeSession();
    ClarifyOutcome out = Clarify(s, *sc.gateway, "ambiguity1", "A question");
    c.That(out.route == row.route, std::string(row.intent) + " routed wrong");
    c.That(Kinds(s.call_log) == row.calls, std::string(row.intent) + " call records");
    for (const CallRecord& r : s.call_log) {
      ModelTier want = r.kind == CallKind::kIntentClassification ? ModelTier::kFast
                                                                  : ModelTier::kFrontier;
      c.That(r.tier == want, std::string(row.intent) + " tier");
    }
  }
}

Json PromptExample() {
  std::string_view text = PromptText(PromptId::kMarkIdentification);
  std::size_t key = text.find("\"enrichedMarks\"");
  std::size_t start = text.rfind('{', key);
  int depth = 0;
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    if (text[i] == '}' && --depth == 0) {
      return Json::parse(text.substr(start, i - start + 1));
    }
  }
  return Json();
}

std::vector<NumberedMark> Marks(int n) {
  std::vector<RawShape> shapes;
  for (int i = 1; i <= n; ++i) {
    shapes.push_back({"shape:" + std::to_string(i), "rectangle", {10.0 * i, 0, 10, 10}, {}});
  }
  return AssignMarkNumbers(shapes);
}

void MarkConsolidation(Check& c) {
  IdentificationResult worked =
      IdentificationFromJson(PromptExample(), "$", UnknownFields::kReject);
  c.That(worked.groups.size() == 1 && worked.groups[0].representative_mark == 4,
         "prompt example not found");
  c.That(ValidateIdentification(worked, Marks(6)).empty(), "prompt example rejected");
  std::vector<Entity> we = ConsolidateEntities(worked);
  c.That(we.size() == 4 && we.back().member_marks == std::vector<int>{4, 5, 6},
         "prompt example consolidation");

  // Twelve marks: groups {1..4}, {5,6,7}, {8,9,10}; marks 11 and 12 alone.
  IdentificationResult twelve;
  for (int i = 1; i <= 12; ++i) {
    twelve.enriched_marks.push_back({i, SemanticRole::kResource, "part " + std::to_string(i), {}});
  }
  twelve.groups = {{1, {1, 2, 3, 4}, "Nurse", SemanticRole::kSubject},
                   {5, {5, 6, 7}, "Medicine Cabinet", SemanticRole::kResource},
                   {8, {8, 9, 10}, "Night shift", SemanticRole::kContext}};
  twelve.relationships = {{2, 6, "open", RelationshipType::kArrow}};
  c.That(ValidateIdentification(twelve, Marks(12)).empty(), "12-mark fixture rejected");
  std::vector<Entity> e = ConsolidateEntities(twelve);
  std::vector<int> ids;
  for (const Entity& x : e) ids.push_back(x.entity_id);
  c.That(ids == std::vector<int>({1, 5, 8, 11, 12}), "12-mark fixture entity ids");
  c.That(e.size() == 5 && e[0].role == SemanticRole::kSubject && e[0].label == "Nurse",
         "group attributes");

  IdentificationResult not_lowest = twelve;
  not_lowest.groups[1].representative_mark = 6;
  c.That(!ValidateIdentification(not_lowest, Marks(12)).empty(),
         "representative-not-lowest accepted");
  IdentificationResult overlap = twelve;
  overlap.groups[2].member_marks = {7, 8, 9};
  overlap.groups[2].representative_mark = 7;
  c.That(!ValidateIdentification(overlap, Marks(12)).empty(), "overlapping groups accepted");
}

void CallBudgetOnReplay(Check& c) {
  for (bool max : {false, true}) {
    auto h = testing::MakeHarness(max ? "budget-max" : "budget-min");
    std::string id = max ? "budget-max" : "budget-min";
    max ? testing::MaximumPath(*h, id) : testing::MinimumPath(*h, id);
    SessionState replayed = ReplayArchive(Json::parse(h->service->Export(id).dump()));
    CallBudget budget = ComputeCallBudget(replayed.call_log);
    std::size_t want = max ? 10 : 5;
    c.That(budget.count == want, id + " replayed " + std::to_string(budget.count) + " calls");
    for (const CallRecord& r : replayed.call_log) {
      ModelTier tier = IsFastKind(r.kind) ? ModelTier::kFast : ModelTier::kFrontier;
      c.That(r.tier == tier, id + " tier of " + std::string(ToString(r.kind)));
    }
  }
}

SessionState TestStage() {
  SessionState s = testing::AnalyzedOfficeSession();
  s.stage = Stage::kTest;
  return s;
}

void PipelineFallback(Check& c) {
  {
    auto sc = testing::MakeScripted();
    sc.script->Enqueue("{\"schemas\": \"not a list\"}", CallKind::kFactorDecomposition)
        .Enqueue(testing::FallbackVignettesReply(3), CallKind::kStoryRealization);
    SessionState s = TestStage();
    TestRun run = RunTestPipeline(s, *sc.gateway, 6);
    c.That(run.used_fallback, "fallback not used");
    c.That(Kinds(s.call_log) ==
               std::vector<CallKind>{CallKind::kFactorDecomposition, CallKind::kStoryRealization},
           "expected decomposition plus one fallback call");
    c.That(sc.script->received().size() == 2 &&
               sc.script->received()[1].schema_id == ToString(SchemaId::kFallbackVignettes),
           "second call is not the single-call fallback");
    c.That(!run.vignettes.empty(), "no vignettes");
    std::set<std::string> numbers = PolicyNumbers(s.policies);
    std::set<int> marks = KnownMarks(s);
    for (const InsightCard& v : run.vignettes) {
      c.That(ValidateInsight(v, numbers, marks).empty(), v.id + " invalid");
    }
  }
  {
    auto sc = testing::MakeScripted();
    bool drifted = false;
    sc.script->Enqueue(testing::OfficeDecompositionReply())
        .EnqueueHandler([&](const ChatRequest& r) {
          Json doc = Json::parse(testing::RealizeCandidates(r));
          for (Json& v : doc["vignettes"]) {
            if (v["expectedOutcome"] == "Deny") {
              v["expectedOutcome"] = "Ambiguous";
              drifted = true;
              break;
            }
          }
          return doc.dump();
        })
        .EnqueueHandler(testing::RealizeCandidates);
    SessionState s = TestStage();
    TestRun run = RunTestPipeline(s, *sc.gateway, 6);
    c.That(drifted, "no Deny case in the selection to drift");
    c.That(!run.used_fallback && s.call_log.size() == 3, "drift was not re-asked");
    std::vector<ChatRequest> sent = sc.script->received();
    c.That(sent.size() == 3 && sent[2].user_turns.size() == 2 &&
               std::get<TextPart>(sent[2].user_turns[1]).text.find("expectedOutcome") !=
                   std::string::npos,
           "re-ask does not name the drifted field");
    Json cases = testing::CandidatesIn(sent[1]);
    for (std::size_t i = 0; i < run.vignettes.size() && i < cases.size(); ++i) {
      c.That(std::string(ToString(*run.vignettes[i].expected_outcome)) ==
                 cases[i]["expectedOutcome"].get<std::string>(),
             "final outcome differs from the computed one");
    }
  }
}

void ExportReplay(Check& c) {
  auto h = testing::MakeHarness("replay");
  testing::MaximumPath(*h, "replay");
  SessionState original = h->service->Get("replay");
  c.That(original.policies.size() == 3, "session does not have 3 policies");
  std::string archive = h->service->Export("replay").dump();
  SessionState replayed = ReplayArchive(Json::parse(archive));
  c.That(ToJson(replayed).dump() == ToJson(original).dump(), "replayed state differs");
}

struct Criterion {
  const char* name;
  std::function<void(Check&)> run;
};

}  // namespace
}  // namespace sbac

int main() {
  using sbac::Check;
  const std::vector<sbac::Criterion> criteria = {
      {"worst-boundary truth table", sbac::OutcomeTruthTable},
      {"scoring weights and monotonicity", sbac::ScoringWeights},
      {"enumeration count", sbac::EnumerationCount},
      {"greedy selection against oracle", sbac::GreedySelection},
      {"ripple reference oracle", sbac::RippleOracle},
      {"edit markers applied once", sbac::MarkerExactlyOnce},
      {"intent routing matrix", sbac::RoutingMatrix},
      {"mark consolidation", sbac::MarkConsolidation},
      {"call budget on replay", sbac::CallBudgetOnReplay},
      {"pipeline fallback and drift re-ask", sbac::PipelineFallback},
      {"export and replay byte-identical", sbac::ExportReplay},
  };
  int failed = 0;
  for (const sbac::Criterion& criterion : criteria) {
    Check check;
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.That(false, std::string("threw: ") + e.what());
    }
    if (check.ok()) {
      std::cout << "[PASS] " << criterion.name << "\n";
    } else {
      ++failed;
      std::cout << "[FAIL] " << criterion.name << ": " << check.Detail() << "\n";
    }
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
