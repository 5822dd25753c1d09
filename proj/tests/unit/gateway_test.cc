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

#include <filesystem>

#include <gtest/gtest.h>

#include "sbac/errors.h"
#include "sbac/llm_gateway.h"
#include "sbac/transports.h"
#include "testing/office_fixture.h"

namespace sbac {
namespace {

using testing::MakeScripted;

ChatRequest Request(CallKind kind, std::string text = "hello") {
  ChatRequest r;
  r.kind = kind;
  r.system_prompt = "system";
  r.user_turns.push_back(TextPart{std::move(text)});
  r.schema_id = "analysis";
  return r;
}

TEST(Tiers, FastKindsAreExactlyThree) {
  std::set<CallKind> fast;
  for (CallKind k : kAllCallKinds) {
    if (TierFor(k) == ModelTier::kFast) fast.insert(k);
    EXPECT_EQ(CallKindFromString(ToString(k)), k);
  }
  EXPECT_EQ(fast, (std::set<CallKind>{CallKind::kIntentClassification,
                                      CallKind::kPolicyPropagation,
                                      CallKind::kInsightPropagation}));
}

TEST(Gateway, RecordsOneCallOnSuccess) {
  auto s = MakeScripted();
  s.script->Enqueue("{\"ok\":true}", CallKind::kPolicyPropagation);
  CallLog log;
  std::string reply = s.gateway->Invoke(Request(CallKind::kPolicyPropagation), "s1", log);
  EXPECT_EQ(reply, "{\"ok\":true}");
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0].kind, CallKind::kPolicyPropagation);
  EXPECT_EQ(log[0].tier, ModelTier::kFast);
  EXPECT_EQ(log[0].schema_id, "analysis");
  EXPECT_EQ(log[0].request_digest, RequestDigest(Request(CallKind::kPolicyPropagation)));
  EXPECT_EQ(log[0].timestamp, FormatTimestamp(testing::FixedTime()));
  EXPECT_EQ(log[0].timestamp.size(), std::string("2026-10-01T00:00:00.000Z").size());
  EXPECT_EQ(log[0].timestamp.back(), 'Z');
}

TEST(Gateway, RetriesOnceOnTransportFailure) {
  auto s = MakeScripted();
  s.script->EnqueueError(ErrorCode::kTimeoutError).Enqueue("fine");
  CallLog log;
  EXPECT_EQ(s.gateway->Invoke(Request(CallKind::kCiAnalysis), "s1", log), "fine");
  EXPECT_EQ(log.size(), 1u);
  EXPECT_EQ(s.script->received().size(), 2u);
}

TEST(Gateway, GivesUpAfterBudgetWithoutRecording) {
  auto s = MakeScripted();
  s.script->EnqueueError(ErrorCode::kTransportError)
      .EnqueueError(ErrorCode::kTransportError)
      .Enqueue("never reached");
  CallLog log;
  try {
    s.gateway->Invoke(Request(CallKind::kCiAnalysis), "s1", log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransportError);
  }
  EXPECT_TRUE(log.empty());
  EXPECT_EQ(s.script->pending(), 1u);
}

TEST(Gateway, NonTransportErrorsAreNotRetried) {
  auto s = MakeScripted();
  s.script->Enqueue("x", CallKind::kSketchSync).Enqueue("y");
  CallLog log;
  try {
    s.gateway->Invoke(Request(CallKind::kCiAnalysis), "s1", log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFixtureMismatch);
  }
  EXPECT_EQ(s.script->pending(), 1u);
}

TEST(Gateway, ImagesOnlyWhereTheKindTakesThem) {
  auto s = MakeScripted();
  s.script->SetFallbackHandler([](const ChatRequest&) { return "ok"; });
  CallLog log;
  ChatRequest som = Request(CallKind::kCiAnalysis);
  som.user_turns.push_back(ImagePart{testing::TinyPng(), ImagePurpose::kSom});
  EXPECT_NO_THROW(s.gateway->Invoke(som, "s", log));
  ChatRequest wrong = Request(CallKind::kCiAnalysis);
  wrong.user_turns.push_back(ImagePart{testing::TinyPng(), ImagePurpose::kNumbered});
  EXPECT_THROW(s.gateway->Invoke(wrong, "s", log), Error);
  ChatRequest none = Request(CallKind::kPolicyPropagation);
  none.user_turns.push_back(ImagePart{testing::TinyPng(), ImagePurpose::kUnannotated});
  EXPECT_THROW(s.gateway->Invoke(none, "s", log), Error);
  EXPECT_EQ(log.size(), 1u);
}

TEST(Digest, SensitiveToEveryPart) {
  ChatRequest base = Request(CallKind::kCiAnalysis);
  base.user_turns.push_back(ImagePart{testing::TinyPng('a'), ImagePurpose::kSom});
  std::string d = RequestDigest(base);
  EXPECT_EQ(d, RequestDigest(base));
  EXPECT_EQ(d.size(), 64u);

  ChatRequest other = base;
  other.system_prompt += " ";
  EXPECT_NE(RequestDigest(other), d);
  other = base;
  std::get<ImagePart>(other.user_turns[1]).png = testing::TinyPng('b');
  EXPECT_NE(RequestDigest(other), d);
  other = base;
  other.schema_id = "x";
  EXPECT_NE(RequestDigest(other), d);
  other = base;
  other.kind = CallKind::kSketchSync;
  EXPECT_NE(RequestDigest(other), d);
}

TEST(Replay, ServesByKindAndIndexWithRecordedTiming) {
  Fixture f0{CallKind::kCiAnalysis, 0, "", "first", "2026-01-01T00:00:00.000Z", 1234};
  Fixture f1{CallKind::kSketchSync, 1, "", "second", std::nullopt, std::nullopt};
  auto replay = std::make_shared<ReplayTransport>(std::vector<Fixture>{f1, f0});
  Gateway gateway(replay, GatewayOptions{0, testing::FixedTime});
  CallLog log;
  EXPECT_EQ(gateway.Invoke(Request(CallKind::kCiAnalysis), "s", log), "first");
  EXPECT_EQ(log[0].timestamp, "2026-01-01T00:00:00.000Z");
  EXPECT_EQ(log[0].latency_ms, 1234);
  EXPECT_EQ(gateway.Invoke(Request(CallKind::kSketchSync), "s", log), "second");
  EXPECT_EQ(log[1].timestamp, FormatTimestamp(testing::FixedTime()));
  try {
    gateway.Invoke(Request(CallKind::kSketchSync), "s", log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransportError);
  }
}

TEST(Replay, KindOrDigestMismatchIsReported) {
  ChatRequest req = Request(CallKind::kCiAnalysis);
  Fixture f{CallKind::kCiAnalysis, 0, RequestDigest(req), "r", std::nullopt, std::nullopt};
  auto replay = std::make_shared<ReplayTransport>(std::vector<Fixture>{f}, true);
  Gateway gateway(replay, GatewayOptions{0, testing::FixedTime});
  CallLog log;
  EXPECT_EQ(gateway.Invoke(req, "s", log), "r");

  CallLog fresh;
  try {
    gateway.Invoke(Request(CallKind::kCiAnalysis, "changed"), "s", fresh);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFixtureMismatch);
  }
  try {
    gateway.Invoke(Request(CallKind::kSketchSync), "s", fresh);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFixtureMismatch);
  }
}

TEST(Replay, SessionFixturesShadowSharedOnes) {
  auto replay = std::make_shared<ReplayTransport>(std::vector<Fixture>{
      {CallKind::kCiAnalysis, 0, "", "shared", std::nullopt, std::nullopt}});
  replay->SetSessionFixtures(
      "mine", {{CallKind::kCiAnalysis, 0, "", "own", std::nullopt, std::nullopt}});
  Gateway gateway(replay);
  CallLog a, b;
  EXPECT_EQ(gateway.Invoke(Request(CallKind::kCiAnalysis), "mine", a), "own");
  EXPECT_EQ(gateway.Invoke(Request(CallKind::kCiAnalysis), "other", b), "shared");
}

TEST(Recording, WritesFixturesThatReplayIdentically) {
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "sbac_recording_test";
  std::filesystem::remove_all(dir);
  auto s = MakeScripted();
  s.script->Enqueue("one").Enqueue("two");
  auto recorder = std::make_shared<RecordingTransport>(s.script, dir);
  Gateway live(recorder, GatewayOptions{1, testing::FixedTime});
  CallLog log;
  live.Invoke(Request(CallKind::kCiAnalysis), "sess", log);
  live.Invoke(Request(CallKind::kFactorDecomposition), "sess", log);
  EXPECT_TRUE(std::filesystem::exists(dir / "sess" / "0000_ci_analysis.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "sess" / "0001_factor_decomposition.json"));

  std::vector<Fixture> loaded = LoadFixtureDir(dir / "sess");
  EXPECT_EQ(loaded, FixturesFromCallLog(log));

  Gateway replay(std::make_shared<ReplayTransport>(loaded, true));
  CallLog again;
  replay.Invoke(Request(CallKind::kCiAnalysis), "sess", again);
  replay.Invoke(Request(CallKind::kFactorDecomposition), "sess", again);
  EXPECT_EQ(again, log);
  std::filesystem::remove_all(dir);
}

TEST(CallLogJson, RoundTrip) {
  auto s = MakeScripted();
  s.script->Enqueue("a").Enqueue("b");
  CallLog log;
  s.gateway->Invoke(Request(CallKind::kCiAnalysis), "s", log);
  s.gateway->Invoke(Request(CallKind::kStoryRealization), "s", log);
  EXPECT_EQ(CallLogFromJson(CallLogToJson(log), "log"), log);
  for (const Fixture& f : FixturesFromCallLog(log)) {
    EXPECT_EQ(FixtureFromJson(ToJson(f), "f"), f);
  }
}

}  // namespace
}  // namespace sbac
