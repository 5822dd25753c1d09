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

#include <gtest/gtest.h>

#include "sbac/errors.h"
#include "sbac/ripple_engine.h"
#include "testing/office_fixture.h"

namespace sbac {
namespace {

using testing::MakeScripted;

PolicyEdit Edit(std::string_view pn, PolicyField field, std::string value) {
  return MakeEdit(testing::OfficePolicies(), pn, field, std::move(value));
}

std::string PolicyRippleReply(const std::vector<Policy>& policies, bool ripple,
                              const std::string& summary = "s") {
  return Json{{"hasRipple", ripple}, {"summary", summary},
              {"policies", PoliciesToJson(policies)}}
      .dump();
}

std::string InsightRippleReply(const std::vector<InsightCard>& cards) {
  return Json{{"hasChanges", true}, {"summary", "cards updated"},
              {"insights", InsightsToJson(cards)}}
      .dump();
}

TEST(EditKinds, FieldDecidesTheType) {
  EXPECT_EQ(ClassifyEdit(PolicyField::kSubject, "a", "b"), EditType::kRenameSubject);
  EXPECT_EQ(ClassifyEdit(PolicyField::kResource, "a", "b"), EditType::kRenameResource);
  EXPECT_EQ(ClassifyEdit(PolicyField::kAction, "a", "b"), EditType::kActionChange);
  EXPECT_EQ(ClassifyEdit(PolicyField::kContext, "a", "b"), EditType::kContextChange);
  EXPECT_EQ(ClassifyEdit(PolicyField::kDescription, "a", "b"), EditType::kTextOnly);
  EXPECT_EQ(ClassifyEdit(PolicyField::kExplanation, "a", "b"), EditType::kTextOnly);
  try {
    ClassifyEdit(PolicyField::kSubject, "a", "a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoOpEdit);
  }
  try {
    Edit("policy9", PolicyField::kSubject, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  EXPECT_EQ(PolicyFieldFromString("context"), PolicyField::kContext);
  EXPECT_EQ(PolicyFieldFromString("elements"), std::nullopt);
}

TEST(WholeToken, RespectsWordBoundaries) {
  EXPECT_EQ(ReplaceWholeToken("Staff and Staffing", "Staff", "Crew"), "Crew and Staffing");
  EXPECT_EQ(ReplaceWholeToken("Maintenance Staff's key", "Maintenance Staff", "Crew"),
            "Crew's key");
  EXPECT_EQ(ReplaceWholeToken("staff Staff", "Staff", "Crew"), "staff Crew");
  EXPECT_EQ(ReplaceWholeToken("a_Staff Staff_b", "Staff", "Crew"), "a_Staff Staff_b");
  EXPECT_EQ(ReplaceWholeToken("Staff", "Staff", "Senior Staff"), "Senior Staff");
  EXPECT_EQ(ReplaceWholeToken("aaa", "aa", "b"), "aaa");
  EXPECT_EQ(ReplaceWholeToken("x(ab)y", "(ab)", "[c]"), "x[c]y");
  EXPECT_EQ(ReplaceWholeToken("", "a", "b"), "");
  EXPECT_EQ(ReplaceWholeToken("abc", "", "b"), "abc");
}

TEST(Oracle, RenameRipplesIntoOtherPolicies) {
  std::vector<Policy> before = testing::OfficePolicies();
  PolicyEdit e = Edit("policy1", PolicyField::kSubject, "Facilities Crew");
  RippleResult r = ReferenceOracle(e, before);
  EXPECT_TRUE(r.has_ripple);
  EXPECT_EQ(r.summary, "Renamed 'Maintenance Staff' to 'Facilities Crew' across 2 policies");
  EXPECT_EQ(r.policies[0].subject, "Facilities Crew");
  EXPECT_EQ(r.policies[0].description,
            "Facilities Crew can unlock Front Door during scheduled maintenance");
  EXPECT_EQ(r.policies[2].context, "When covering for Facilities Crew");
  EXPECT_EQ(r.policies[2].subject, "Substitute Maintenance");
  EXPECT_EQ(r.policies[1], before[1]);
  EXPECT_FALSE(r.collision);
}

TEST(Oracle, NewValueContainingOldIsNotRenamedTwice) {
  PolicyEdit e = Edit("policy2", PolicyField::kSubject, "Senior Contractor");
  RippleResult r = ReferenceOracle(e, testing::OfficePolicies());
  EXPECT_EQ(r.policies[1].subject, "Senior Contractor");
  EXPECT_EQ(r.policies[1].description, "Senior Contractor can view Lobby Camera");
  EXPECT_EQ(r.summary, "Renamed 'Contractor' to 'Senior Contractor' across 1 policy");
}

TEST(Oracle, RenameOntoExistingNameIsFlagged) {
  PolicyEdit e = Edit("policy3", PolicyField::kSubject, "Maintenance Staff");
  RippleResult r = ReferenceOracle(e, testing::OfficePolicies());
  ASSERT_TRUE(r.collision);
  EXPECT_NE(r.collision->find("policy1"), std::string::npos);
  EXPECT_EQ(r.policies.size(), 3u);
}

TEST(Oracle, TextOnlyTouchesOneField) {
  std::vector<Policy> before = testing::OfficePolicies();
  PolicyEdit e = Edit("policy2", PolicyField::kDescription, "Contractors watch the lobby feed");
  RippleResult r = ReferenceOracle(e, before);
  EXPECT_FALSE(r.has_ripple);
  EXPECT_EQ(r.policies[1].description, "Contractors watch the lobby feed");
  r.policies[1].description = before[1].description;
  EXPECT_EQ(r.policies, before);
  EXPECT_THROW(ReferenceOracle(Edit("policy2", PolicyField::kAction, "edit"), before), Error);
}

TEST(PhaseOne, TextOnlyMakesNoCall) {
  auto sc = MakeScripted();
  CallLog log;
  RippleResult r = PropagatePolicies(Edit("policy1", PolicyField::kExplanation, "New"),
                                     testing::OfficePolicies(), *sc.gateway, "s", log);
  EXPECT_EQ(r.source, "fast_path");
  EXPECT_TRUE(log.empty());
  EXPECT_TRUE(sc.script->received().empty());
}

TEST(PhaseOne, AgreeingModelRenameIsAccepted) {
  auto sc = MakeScripted();
  sc.script->EnqueueHandler(testing::PolicyRippleEcho, CallKind::kPolicyPropagation);
  CallLog log;
  PolicyEdit e = Edit("policy1", PolicyField::kSubject, "Facilities Crew");
  RippleResult r = PropagatePolicies(e, testing::OfficePolicies(), *sc.gateway, "s", log);
  EXPECT_EQ(r.source, "model");
  EXPECT_FALSE(r.divergence);
  EXPECT_EQ(r.policies, ReferenceOracle(e, testing::OfficePolicies()).policies);
  EXPECT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0].tier, ModelTier::kFast);

  std::string text = testing::FirstText(sc.script->received()[0]);
  EXPECT_EQ(text.find("Edit type: RENAME_SUBJECT\nPolicy: policy1\nField: subject\n"
                      "Old value: \"Maintenance Staff\"\nNew value: \"Facilities Crew\"\n"),
            0u);
}

TEST(PhaseOne, DivergentModelRenameLosesToTheOracle) {
  auto sc = MakeScripted();
  std::vector<Policy> sloppy = ApplyFieldEdit(
      Edit("policy1", PolicyField::kSubject, "Facilities Crew"), testing::OfficePolicies());
  sloppy[1].subject = "Facilities Crew";  // renamed something it should not have
  sc.script->Enqueue(PolicyRippleReply(sloppy, true));
  CallLog log;
  PolicyEdit e = Edit("policy1", PolicyField::kSubject, "Facilities Crew");
  RippleResult r = PropagatePolicies(e, testing::OfficePolicies(), *sc.gateway, "s", log);
  EXPECT_TRUE(r.divergence);
  EXPECT_EQ(r.source, "oracle");
  EXPECT_EQ(r.policies[1].subject, "Contractor");
}

TEST(PhaseOne, UnusableReplyFallsBack) {
  PolicyEdit rename = Edit("policy1", PolicyField::kSubject, "Facilities Crew");
  {
    auto sc = MakeScripted();
    sc.script->Enqueue("{\"hasRipple\": true}");
    CallLog log;
    RippleResult r = PropagatePolicies(rename, testing::OfficePolicies(), *sc.gateway, "s", log);
    EXPECT_EQ(r.source, "oracle");
    EXPECT_EQ(r.policies, ReferenceOracle(rename, testing::OfficePolicies()).policies);
  }
  {
    auto sc = MakeScripted();
    sc.script->EnqueueError(ErrorCode::kTransportError).EnqueueError(ErrorCode::kTimeoutError);
    CallLog log;
    RippleResult r = PropagatePolicies(rename, testing::OfficePolicies(), *sc.gateway, "s", log);
    EXPECT_EQ(r.source, "oracle");
    EXPECT_TRUE(log.empty());
  }
  {
    auto sc = MakeScripted();
    sc.script->Enqueue("garbage");
    CallLog log;
    PolicyEdit action = Edit("policy1", PolicyField::kAction, "open");
    RippleResult r = PropagatePolicies(action, testing::OfficePolicies(), *sc.gateway, "s", log);
    EXPECT_TRUE(r.degraded);
    EXPECT_EQ(r.policies, ApplyFieldEdit(action, testing::OfficePolicies()));
  }
}

TEST(PhaseOne, ShortListKeepsTheOriginalArray) {
  auto sc = MakeScripted();
  PolicyEdit action = Edit("policy1", PolicyField::kAction, "open");
  std::vector<Policy> two = ApplyFieldEdit(action, testing::OfficePolicies());
  two.pop_back();
  sc.script->Enqueue(PolicyRippleReply(two, true));
  CallLog log;
  RippleResult r = PropagatePolicies(action, testing::OfficePolicies(), *sc.gateway, "s", log);
  EXPECT_TRUE(r.degraded);
  EXPECT_EQ(r.source, "original");
  EXPECT_EQ(r.policies, ApplyFieldEdit(action, testing::OfficePolicies()));
}

TEST(PhaseOne, ActionChangeTakesOnlyTheEditedProse) {
  auto sc = MakeScripted();
  PolicyEdit action = Edit("policy1", PolicyField::kAction, "open");
  std::vector<Policy> reply = ApplyFieldEdit(action, testing::OfficePolicies());
  reply[0].description = "Maintenance Staff can open Front Door during scheduled maintenance";
  reply[0].resource = "Back Door";        // ignored
  reply[2].description = "rewritten";     // ignored
  sc.script->Enqueue(PolicyRippleReply(reply, true, "unlock became open"));
  CallLog log;
  RippleResult r = PropagatePolicies(action, testing::OfficePolicies(), *sc.gateway, "s", log);
  EXPECT_EQ(r.source, "model");
  EXPECT_TRUE(r.has_ripple);
  EXPECT_EQ(r.summary, "unlock became open");
  EXPECT_EQ(r.policies[0].description, reply[0].description);
  EXPECT_EQ(r.policies[0].resource, "Front Door");
  EXPECT_EQ(r.policies[2], testing::OfficePolicies()[2]);
}

TEST(Candidates, PolicyListOrElementOverlap) {
  std::vector<Policy> p = testing::OfficePolicies();
  std::vector<InsightCard> cards = testing::OfficeInsights();
  EXPECT_TRUE(IsRippleCandidate(cards[0], p[1]));   // shares [2][5]
  EXPECT_FALSE(IsRippleCandidate(cards[0], p[0]));
  EXPECT_TRUE(IsRippleCandidate(cards[1], p[0]));   // shares [1]
  InsightCard v = cards[0];
  v.type = IssueType::kVignette;
  EXPECT_FALSE(IsRippleCandidate(v, p[1]));         // vignettes need the list
  v.relevant_policies = std::vector<std::string>{"policy2"};
  EXPECT_TRUE(IsRippleCandidate(v, p[1]));
  EXPECT_FALSE(IsRippleCandidate(v, p[0]));
}

TEST(PhaseTwo, SkippedWithoutRipple) {
  auto sc = MakeScripted();
  CallLog log;
  PolicyEdit e = Edit("policy2", PolicyField::kSubject, "Vendor");
  RippleResult p1 = ReferenceOracle(e, testing::OfficePolicies());
  p1.has_ripple = false;
  InsightRippleResult r = PropagateInsights(e, p1, p1.policies, testing::OfficeInsights(),
                                            *sc.gateway, "s", log);
  EXPECT_TRUE(r.skipped);
  EXPECT_TRUE(log.empty());
}

TEST(PhaseTwo, RenameSwapsNamesDeterministically) {
  auto sc = MakeScripted();
  sc.script->Enqueue(InsightRippleReply(testing::OfficeInsights()));  // model did nothing
  CallLog log;
  PolicyEdit e = Edit("policy1", PolicyField::kSubject, "Facilities Crew");
  RippleResult p1 = ReferenceOracle(e, testing::OfficePolicies());
  InsightRippleResult r = PropagateInsights(e, p1, p1.policies, testing::OfficeInsights(),
                                            *sc.gateway, "s", log);
  EXPECT_TRUE(r.has_changes);
  EXPECT_EQ(r.insights[1].heading, "Does Facilities Crew include substitutes?");
  EXPECT_EQ(r.insights[1].rationale.expected,
            "Only Facilities Crew unlock during scheduled maintenance");
  EXPECT_EQ(r.insights[0], testing::OfficeInsights()[0]);
  EXPECT_EQ(log.size(), 1u);
}

TEST(PhaseTwo, ContextChangeMarksAffectedCardsOnce) {
  PolicyEdit e = Edit("policy2", PolicyField::kContext, "Business hours only");
  RippleResult p1;
  p1.has_ripple = true;
  p1.policies = ApplyFieldEdit(e, testing::OfficePolicies());
  std::vector<InsightCard> cards = testing::OfficeInsights();

  std::vector<InsightCard> reply = cards;
  reply[0].heading += " [Updated]";
  reply[1].heading += " [Updated]";  // not a candidate for policy2
  auto sc = MakeScripted();
  sc.script->Enqueue(InsightRippleReply(reply)).Enqueue(InsightRippleReply(reply));
  CallLog log;
  InsightRippleResult r = PropagateInsights(e, p1, p1.policies, cards, *sc.gateway, "s", log);
  std::string marker = EditMarker(ChangeSummary(e));
  EXPECT_EQ(marker, " [Edit: may be affected by context of policy2 changed to 'Business hours only']");
  EXPECT_EQ(r.insights[0].heading, cards[0].heading + " [Updated]");
  EXPECT_EQ(r.insights[0].description, cards[0].description + marker);
  EXPECT_EQ(r.insights[1], cards[1]);

  // A second pass over already-marked cards adds nothing.
  InsightRippleResult again =
      PropagateInsights(e, p1, p1.policies, r.insights, *sc.gateway, "s", log);
  EXPECT_EQ(again.insights, r.insights);
  EXPECT_FALSE(again.has_changes);
}

TEST(PhaseTwo, VignetteTakesTheModelOutcome) {
  PolicyEdit e = Edit("policy2", PolicyField::kAction, "record");
  RippleResult p1;
  p1.has_ripple = true;
  p1.policies = ApplyFieldEdit(e, testing::OfficePolicies());
  std::vector<InsightCard> cards =
      InsightsFromJson(Json::parse(testing::FallbackVignettesReply(1))["vignettes"], "v",
                       UnknownFields::kReject);
  std::vector<InsightCard> reply = cards;
  reply[0].expected_outcome = ExpectedOutcome::kDeny;
  auto sc = MakeScripted();
  sc.script->Enqueue(InsightRippleReply(reply));
  CallLog log;
  InsightRippleResult r = PropagateInsights(e, p1, p1.policies, cards, *sc.gateway, "s", log);
  EXPECT_EQ(r.insights[0].expected_outcome, ExpectedOutcome::kDeny);
  EXPECT_TRUE(r.insights[0].heading.ends_with(" [Updated]"));
}

TEST(PhaseTwo, IncompleteReplyIsDegraded) {
  PolicyEdit e = Edit("policy2", PolicyField::kContext, "Weekdays");
  RippleResult p1;
  p1.has_ripple = true;
  p1.policies = ApplyFieldEdit(e, testing::OfficePolicies());
  std::vector<InsightCard> cards = testing::OfficeInsights();
  auto sc = MakeScripted();
  sc.script->Enqueue(InsightRippleReply({cards[0]}));
  CallLog log;
  InsightRippleResult r = PropagateInsights(e, p1, p1.policies, cards, *sc.gateway, "s", log);
  EXPECT_TRUE(r.degraded);
  EXPECT_EQ(r.insights, cards);
}

TEST(ApplyEdit, CommitsBothPhases) {
  auto sc = MakeScripted();
  sc.script->EnqueueHandler(testing::PolicyRippleEcho)
      .EnqueueHandler(testing::InsightRippleEcho, CallKind::kInsightPropagation);
  SessionState s = testing::AnalyzedOfficeSession();
  s.insights.Accept("ambiguity1");
  PolicyEditOutcome out =
      ApplyPolicyEdit(s, *sc.gateway, "policy1", PolicyField::kSubject, "Facilities Crew");
  EXPECT_EQ(s.policies[2].context, "When covering for Facilities Crew");
  const LedgerEntry* card = s.insights.Find("ambiguity1");
  EXPECT_EQ(card->card.heading, "Does Facilities Crew include substitutes?");
  EXPECT_EQ(card->lifecycle, Lifecycle::kAccepted);
  EXPECT_EQ(s.call_log.size(), 2u);
  EXPECT_EQ(s.audit_log.back().event, "policy_edit");
  Json j = ToJson(out);
  EXPECT_EQ(j["edit"]["editType"], ToString(EditType::kRenameSubject));
  EXPECT_EQ(j["policyRipple"]["source"], "model");
}

TEST(ApplyEdit, CollisionLandsInTheStatusNote) {
  auto sc = MakeScripted();
  sc.script->SetFallbackHandler(testing::PolicyRippleEcho);
  SessionState s = testing::AnalyzedOfficeSession();
  s.insights.Dismiss("risk1", "x");
  s.insights.Dismiss("ambiguity1", "x");
  ApplyPolicyEdit(s, *sc.gateway, "policy3", PolicyField::kSubject, "Maintenance Staff");
  EXPECT_NE(s.status_note.find("already the subject of policy1"), std::string::npos);
  EXPECT_EQ(s.policies[0].subject, "Maintenance Staff");
  EXPECT_EQ(s.policies[2].subject, "Maintenance Staff");
}

}  // namespace
}  // namespace sbac
