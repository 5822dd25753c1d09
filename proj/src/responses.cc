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

#include "sbac/responses.h"

#include <set>

#include "sbac/errors.h"

namespace sbac {
namespace {

constexpr UnknownFields kStrict = UnknownFields::kReject;

Json ParseDocument(std::string_view raw) {
  Json doc = ParseJsonText(StripCodeFence(raw));
  if (!doc.is_object()) throw SchemaError("$", "expected a JSON object");
  return doc;
}

std::optional<std::string> NullableString(ObjectReader& r,
                                          std::string_view key) {
  return r.OptionalString(key);
}

void CheckKeys(const Json& event, const std::string& path,
               const std::set<std::string>& allowed) {
  for (auto it = event.begin(); it != event.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw SchemaError(path + "." + it.key(), "unexpected field");
    }
  }
}

void ValidateSketchEvent(const Json& event, const std::string& path) {
  ObjectReader r(event, path);
  std::string type = r.RequiredString("type");
  if (type == "think") {
    r.RequiredString("intent");
    CheckKeys(event, path, {"type", "intent"});
  } else if (type == "create") {
    r.RequiredString("intent");
    ObjectReader shape(r.Required("shape"), r.PathOf("shape"));
    shape.RequiredNonEmptyString("type");
    shape.RequiredNonEmptyString("shapeId");
    CheckKeys(event, path, {"type", "intent", "shape"});
  } else if (type == "edit") {
    r.RequiredString("intent");
    r.RequiredNonEmptyString("shapeId");
    r.OptionalString("text");
    r.OptionalString("color");
    r.OptionalString("fill");
    if (r.Has("width")) r.RequiredNumber("width");
    if (r.Has("height")) r.RequiredNumber("height");
    CheckKeys(event, path,
              {"type", "intent", "shapeId", "text", "color", "fill", "width",
               "height"});
  } else if (type == "move") {
    r.RequiredString("intent");
    r.RequiredNonEmptyString("shapeId");
    r.RequiredNumber("x");
    r.RequiredNumber("y");
    CheckKeys(event, path, {"type", "intent", "shapeId", "x", "y"});
  } else if (type == "delete") {
    r.RequiredString("intent");
    r.RequiredNonEmptyString("shapeId");
    CheckKeys(event, path, {"type", "intent", "shapeId"});
  } else {
    throw SchemaError(r.PathOf("type"), "unknown event type \"" + type + "\"");
  }
}

std::vector<InsightCard> VignetteArray(ObjectReader& r, std::string_view key) {
  const Json& arr = r.RequiredArray(key);
  std::vector<InsightCard> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string path = IndexPath(r.PathOf(key), i);
    InsightCard card = InsightFromJson(arr[i], path, kStrict);
    if (card.type != IssueType::kVignette) {
      throw SchemaError(path + ".type", "expected vignette");
    }
    if (!card.expected_outcome) {
      throw SchemaError(path + ".expectedOutcome", "missing");
    }
    if (!card.relevant_policies) {
      throw SchemaError(path + ".relevantPolicies", "missing");
    }
    out.push_back(std::move(card));
  }
  return out;
}

}  // namespace

std::string_view ToString(SchemaId id) {
  switch (id) {
    case SchemaId::kIdentification: return "identification";
    case SchemaId::kAnalysis: return "analysis";
    case SchemaId::kClassification: return "classification";
    case SchemaId::kDeepResolution: return "deep_resolution";
    case SchemaId::kSketchSync: return "sketch_sync";
    case SchemaId::kPolicyRipple: return "policy_ripple";
    case SchemaId::kInsightRipple: return "insight_ripple";
    case SchemaId::kDecomposition: return "decomposition";
    case SchemaId::kRealization: return "realization";
    case SchemaId::kFallbackVignettes: return "fallback_vignettes";
  }
  return "";
}

std::optional<SchemaId> SchemaIdFromString(std::string_view s) {
  for (SchemaId id :
       {SchemaId::kIdentification, SchemaId::kAnalysis,
        SchemaId::kClassification, SchemaId::kDeepResolution,
        SchemaId::kSketchSync, SchemaId::kPolicyRipple,
        SchemaId::kInsightRipple, SchemaId::kDecomposition,
        SchemaId::kRealization, SchemaId::kFallbackVignettes}) {
    if (ToString(id) == s) return id;
  }
  return std::nullopt;
}

std::string StripCodeFence(std::string_view raw) {
  auto is_space = [](char c) {
    return c == ' ' || c == '\n' || c == '\r' || c == '\t';
  };
  while (!raw.empty() && is_space(raw.front())) raw.remove_prefix(1);
  while (!raw.empty() && is_space(raw.back())) raw.remove_suffix(1);
  if (raw.size() < 6 || raw.substr(0, 3) != "```" ||
      raw.substr(raw.size() - 3) != "```") {
    return std::string(raw);
  }
  std::size_t first_nl = raw.find('\n');
  if (first_nl == std::string_view::npos) return std::string(raw);
  std::string_view body = raw.substr(first_nl + 1, raw.size() - 3 - first_nl - 1);
  while (!body.empty() && is_space(body.back())) body.remove_suffix(1);
  return std::string(body);
}

std::string_view ToString(NextAction action) {
  return action == NextAction::kTest ? "test" : "continue";
}

std::string_view ToString(Intent intent) {
  switch (intent) {
    case Intent::kUnderstand: return "understand";
    case Intent::kCorrect: return "correct";
    case Intent::kFix: return "fix";
    case Intent::kExplore: return "explore";
    case Intent::kUnclassified: return "unclassified";
  }
  return "unclassified";
}

std::optional<Intent> IntentFromString(std::string_view s) {
  for (Intent i : {Intent::kUnderstand, Intent::kCorrect, Intent::kFix,
                   Intent::kExplore, Intent::kUnclassified}) {
    if (ToString(i) == s) return i;
  }
  return std::nullopt;
}

IdentificationResult ParseIdentification(std::string_view raw) {
  return IdentificationFromJson(ParseDocument(raw), "$", kStrict);
}

AnalyzeResponse ParseAnalyzeResponse(std::string_view raw) {
  Json doc = ParseDocument(raw);
  ObjectReader r(doc, "$");
  AnalyzeResponse out;
  out.chat = r.RequiredString("chat");
  out.generate = NullableString(r, "generate");
  out.policies = PoliciesFromJson(r.Required("policies"), r.PathOf("policies"),
                                  kStrict);
  out.insights = InsightsFromJson(r.Required("insights"), r.PathOf("insights"),
                                  kStrict);
  std::string next = r.RequiredString("nextAction");
  if (next == "continue") {
    out.next_action = NextAction::kContinue;
  } else if (next == "test") {
    out.next_action = NextAction::kTest;
  } else {
    throw SchemaError(r.PathOf("nextAction"),
                      "unknown next action \"" + next + "\"");
  }
  r.Finish(kStrict);
  return out;
}

ClassificationResult ParseClassification(std::string_view raw) {
  Json doc = ParseDocument(raw);
  ObjectReader r(doc, "$");
  ClassificationResult out;
  std::string intent = r.RequiredString("intent");
  std::optional<Intent> parsed = IntentFromString(intent);
  if (!parsed) {
    throw SchemaError(r.PathOf("intent"),
                      "unknown intent \"" + intent + "\"");
  }
  out.intent = *parsed;
  out.response = r.RequiredString("response");
  out.dismiss_insight = r.OptionalBool("dismissInsight").value_or(false) &&
                        out.intent == Intent::kCorrect;
  r.Finish(kStrict);
  return out;
}

DeepResolution ParseDeepResolution(std::string_view raw) {
  Json doc = ParseDocument(raw);
  ObjectReader r(doc, "$");
  DeepResolution out;
  out.chat = r.RequiredString("chat");
  out.policies = PoliciesFromJson(r.Required("policies"), r.PathOf("policies"),
                                  kStrict);
  out.insights = InsightsFromJson(r.Required("insights"), r.PathOf("insights"),
                                  kStrict);
  out.generate = NullableString(r, "generate");
  out.proposed_actions =
      r.OptionalStringArray("proposedActions").value_or(
          std::vector<std::string>{});
  if (out.generate.has_value() != !out.proposed_actions.empty()) {
    throw SchemaError(r.PathOf("proposedActions"),
                      out.generate ? "must be non-empty when generate is set"
                                   : "must be empty when generate is null");
  }
  r.Finish(kStrict);
  return out;
}

SketchSyncResponse ParseSketchSync(std::string_view raw) {
  Json doc = ParseDocument(raw);
  ObjectReader r(doc, "$");
  SketchSyncResponse out;
  out.strategy = r.RequiredString("long_description_of_strategy");
  const Json& events = r.RequiredArray("events");
  for (std::size_t i = 0; i < events.size(); ++i) {
    ValidateSketchEvent(events[i], IndexPath(r.PathOf("events"), i));
  }
  out.events = events;
  r.Finish(kStrict);
  return out;
}

PolicyRippleResponse ParsePolicyRipple(std::string_view raw) {
  Json doc = ParseDocument(raw);
  ObjectReader r(doc, "$");
  PolicyRippleResponse out;
  out.has_ripple = r.RequiredBool("hasRipple");
  out.summary = r.RequiredString("summary");
  out.policies = PoliciesFromJson(r.Required("policies"), r.PathOf("policies"),
                                  kStrict);
  r.Finish(kStrict);
  return out;
}

InsightRippleResponse ParseInsightRipple(std::string_view raw) {
  Json doc = ParseDocument(raw);
  ObjectReader r(doc, "$");
  InsightRippleResponse out;
  out.has_changes = r.RequiredBool("hasChanges");
  out.summary = r.RequiredString("summary");
  out.insights = InsightsFromJson(r.Required("insights"), r.PathOf("insights"),
                                  kStrict);
  r.Finish(kStrict);
  return out;
}

DecompositionResponse ParseDecomposition(std::string_view raw) {
  Json doc = ParseDocument(raw);
  ObjectReader r(doc, "$");
  DecompositionResponse out;
  out.schemas = PolicySchemasFromJson(r.Required("schemas"),
                                      r.PathOf("schemas"), kStrict);
  r.Finish(kStrict);
  return out;
}

RealizationResponse ParseRealization(std::string_view raw) {
  Json doc = ParseDocument(raw);
  ObjectReader r(doc, "$");
  RealizationResponse out;
  out.vignettes = VignetteArray(r, "vignettes");
  r.Finish(kStrict);
  return out;
}

Json ParseStructured(std::string_view raw, SchemaId schema) {
  switch (schema) {
    case SchemaId::kIdentification:
      return ToJson(ParseIdentification(raw));
    case SchemaId::kAnalysis:
      return ToJson(ParseAnalyzeResponse(raw));
    case SchemaId::kClassification:
      return ToJson(ParseClassification(raw));
    case SchemaId::kDeepResolution:
      return ToJson(ParseDeepResolution(raw));
    case SchemaId::kSketchSync:
      return ToJson(ParseSketchSync(raw));
    case SchemaId::kPolicyRipple: {
      PolicyRippleResponse p = ParsePolicyRipple(raw);
      return Json{{"hasRipple", p.has_ripple},
                  {"summary", p.summary},
                  {"policies", PoliciesToJson(p.policies)}};
    }
    case SchemaId::kInsightRipple: {
      InsightRippleResponse p = ParseInsightRipple(raw);
      return Json{{"hasChanges", p.has_changes},
                  {"summary", p.summary},
                  {"insights", InsightsToJson(p.insights)}};
    }
    case SchemaId::kDecomposition: {
      Json schemas = Json::array();
      for (const PolicySchema& s : ParseDecomposition(raw).schemas) {
        schemas.push_back(ToJson(s));
      }
      return Json{{"schemas", std::move(schemas)}};
    }
    case SchemaId::kRealization:
    case SchemaId::kFallbackVignettes:
      return Json{{"vignettes", InsightsToJson(ParseRealization(raw).vignettes)}};
  }
  throw SchemaError("$", "unknown schema");
}

Json ToJson(const AnalyzeResponse& response) {
  Json out = Json{{"chat", response.chat}};
  out["generate"] = response.generate ? Json(*response.generate) : Json();
  out["policies"] = PoliciesToJson(response.policies);
  out["insights"] = InsightsToJson(response.insights);
  out["nextAction"] = ToString(response.next_action);
  return out;
}

Json ToJson(const ClassificationResult& result) {
  return Json{{"intent", ToString(result.intent)},
              {"response", result.response},
              {"dismissInsight", result.dismiss_insight}};
}

Json ToJson(const DeepResolution& resolution) {
  Json out = Json{{"chat", resolution.chat},
                  {"policies", PoliciesToJson(resolution.policies)},
                  {"insights", InsightsToJson(resolution.insights)}};
  out["generate"] =
      resolution.generate ? Json(*resolution.generate) : Json();
  out["proposedActions"] = resolution.proposed_actions;
  return out;
}

Json ToJson(const SketchSyncResponse& response) {
  return Json{{"long_description_of_strategy", response.strategy},
              {"events", response.events}};
}

}  // namespace sbac
