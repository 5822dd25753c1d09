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

#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "sbac/errors.h"
#include "sbac/mark_model.h"
#include "testing/office_fixture.h"

namespace sbac {
namespace {

RawShape Box(std::string id, std::string kind = "rectangle") {
  return RawShape{std::move(id), std::move(kind), {0, 0, 10, 10}, std::nullopt};
}

EnrichedMark Mark(int n, SemanticRole role, std::string desc = "m") {
  return EnrichedMark{n, role, std::move(desc), {}};
}

TEST(MarkNumbers, FollowZOrderFromOne) {
  std::vector<RawShape> shapes = {Box("c"), Box("a"), Box("b")};
  std::vector<NumberedMark> marks = AssignMarkNumbers(shapes);
  ASSERT_EQ(marks.size(), 3u);
  EXPECT_EQ(marks[0].mark_number, 1);
  EXPECT_EQ(marks[0].shape_id, "c");
  EXPECT_EQ(marks[2].mark_number, 3);
  EXPECT_EQ(marks[2].shape_id, "b");
  EXPECT_EQ(MarkNumbers(marks), (std::set<int>{1, 2, 3}));
}

TEST(MarkNumbers, DuplicateShapeIdIsRejected) {
  std::vector<RawShape> shapes = {Box("a"), Box("a")};
  try {
    AssignMarkNumbers(shapes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateShapeId);
  }
}

TEST(Identification, OfficeReplyValidatesAndConsolidates) {
  auto marks = AssignMarkNumbers(testing::OfficeSketch());
  IdentificationResult r = IdentificationFromJson(
      Json::parse(testing::OfficeIdentificationReply()), "$",
      UnknownFields::kReject);
  EXPECT_TRUE(ValidateIdentification(r, marks).empty());
  std::vector<Entity> entities = ConsolidateEntities(r);
  ASSERT_EQ(entities.size(), 8u);
  EXPECT_EQ(EntityLine(entities[0]), "[1] Subject: Maintenance Staff");
  EXPECT_EQ(entities[0].related_entities, (std::vector<int>{4, 6, 8}));
  EXPECT_EQ(entities[3].related_entities, (std::vector<int>{1, 6}));
}

TEST(Identification, WorkedGroupWithLowestRepresentative) {
  IdentificationResult r;
  for (int i = 1; i <= 6; ++i) r.enriched_marks.push_back(Mark(i, SemanticRole::kResource));
  r.groups.push_back({4, {5, 4, 6}, "Server Rack", SemanticRole::kResource});
  std::vector<RawShape> shapes;
  for (int i = 1; i <= 6; ++i) shapes.push_back(Box("s" + std::to_string(i)));
  EXPECT_TRUE(ValidateIdentification(r, AssignMarkNumbers(shapes)).empty());
  std::vector<Entity> e = ConsolidateEntities(r);
  ASSERT_EQ(e.size(), 4u);
  EXPECT_EQ(e[3].entity_id, 4);
  EXPECT_EQ(e[3].member_marks, (std::vector<int>{4, 5, 6}));
  EXPECT_EQ(e[3].label, "Server Rack");
}

TEST(Identification, StructuralViolations) {
  std::vector<RawShape> shapes;
  for (int i = 1; i <= 6; ++i) shapes.push_back(Box("s" + std::to_string(i)));
  auto marks = AssignMarkNumbers(shapes);

  IdentificationResult not_lowest;
  not_lowest.groups.push_back({5, {4, 5, 6}, "g", SemanticRole::kResource});
  ASSERT_EQ(ValidateIdentification(not_lowest, marks).size(), 1u);
  EXPECT_EQ(ValidateIdentification(not_lowest, marks)[0].message,
            "representative not lowest");

  IdentificationResult overlap;
  overlap.groups.push_back({1, {1, 2}, "a", SemanticRole::kSubject});
  overlap.groups.push_back({2, {2, 3}, "b", SemanticRole::kSubject});
  ValidationReport r = ValidateIdentification(overlap, marks);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].path, "groups[1].memberMarks[0]");

  IdentificationResult unknown;
  unknown.enriched_marks.push_back(Mark(9, SemanticRole::kSubject));
  unknown.relationships.push_back({2, 2, std::nullopt, RelationshipType::kArrow});
  EXPECT_EQ(ValidateIdentification(unknown, marks).size(), 2u);

  try {
    ConsolidateEntities(overlap);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidIdentification);
  }
}

TEST(Identification, WireFormatRejectsUnknownKeysAndTypes) {
  Json doc = Json::parse(testing::OfficeIdentificationReply());
  doc["relationships"][0]["type"] = "overlap";
  EXPECT_THROW(IdentificationFromJson(doc, "$", UnknownFields::kReject), SchemaError);
  doc = Json::parse(testing::OfficeIdentificationReply());
  doc["enrichedMarks"][0]["confidence"] = 0.9;
  EXPECT_THROW(IdentificationFromJson(doc, "$", UnknownFields::kReject), SchemaError);
  doc = Json::parse(testing::OfficeIdentificationReply());
  EXPECT_EQ(ToJson(IdentificationFromJson(doc, "$", UnknownFields::kReject)), doc);
}

TEST(ElementRefs, ResolveThroughGroups) {
  IdentificationResult r;
  r.enriched_marks = {Mark(1, SemanticRole::kSubject, "Alice"),
                      Mark(2, SemanticRole::kResource)};
  r.groups.push_back({2, {2, 3}, "Files", SemanticRole::kResource});
  std::vector<Entity> entities = ConsolidateEntities(r);
  std::vector<std::string> refs = {"[3]", "[2]", "[1]", "[8]", "bad"};
  ResolvedRefs out = ResolveElementRefs(refs, entities);
  ASSERT_EQ(out.entities.size(), 2u);
  EXPECT_EQ(out.entities[0].label, "Files");
  EXPECT_EQ(out.entities[1].label, "Alice");
  EXPECT_EQ(out.unknown_refs, (std::vector<std::string>{"[8]", "bad"}));
}

TEST(ElementRefs, StripDangling) {
  std::vector<Policy> policies = testing::OfficePolicies();
  std::vector<std::string> stripped =
      StripDanglingElements(policies, {1, 2, 4, 5, 6, 7});
  EXPECT_EQ(stripped, (std::vector<std::string>{"policy3 [8]"}));
  EXPECT_EQ(policies[2].elements, (std::vector<std::string>{"[4]"}));
  EXPECT_EQ(DanglingElements({"[1]", "[9]"}, {1}), (std::vector<std::string>{"[9]"}));
}

TEST(RawShapeJson, RoundTrip) {
  for (const RawShape& s : testing::OfficeSketch()) {
    EXPECT_EQ(RawShapeFromJson(ToJson(s), "s"), s);
  }
}

// Random sketches partitioned into disjoint groups plus singletons.
struct GeneratedLayout {
  IdentificationResult result;
  int mark_count = 0;
  std::map<int, int> owner;  // mark -> expected entity id
};

GeneratedLayout Generate(std::mt19937_64& rng) {
  GeneratedLayout g;
  std::uniform_int_distribution<int> count(1, 20);
  g.mark_count = count(rng);
  std::vector<int> marks(g.mark_count);
  for (int i = 0; i < g.mark_count; ++i) marks[i] = i + 1;
  std::shuffle(marks.begin(), marks.end(), rng);
  std::uniform_int_distribution<int> chunk(1, 4);
  std::bernoulli_distribution grouped(0.5);
  std::size_t at = 0;
  while (at < marks.size()) {
    std::size_t n = std::min<std::size_t>(chunk(rng), marks.size() - at);
    std::vector<int> members(marks.begin() + at, marks.begin() + at + n);
    at += n;
    if (n > 1 && grouped(rng)) {
      int rep = *std::min_element(members.begin(), members.end());
      g.result.groups.push_back({rep, members, "group", SemanticRole::kResource});
      for (int m : members) g.owner[m] = rep;
    } else {
      for (int m : members) {
        g.result.enriched_marks.push_back(Mark(m, SemanticRole::kSubject));
        g.owner[m] = m;
      }
    }
  }
  std::uniform_int_distribution<int> any(1, g.mark_count);
  for (int i = 0; i < g.mark_count / 2; ++i) {
    int a = any(rng), b = any(rng);
    if (a != b) g.result.relationships.push_back({a, b, std::nullopt, RelationshipType::kArrow});
  }
  return g;
}

TEST(ConsolidationProperty, EveryMarkInExactlyOneEntity) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 300; ++round) {
    GeneratedLayout g = Generate(rng);
    std::vector<Entity> entities = ConsolidateEntities(g.result);

    std::set<int> expected_ids;
    for (const auto& [mark, id] : g.owner) expected_ids.insert(id);
    ASSERT_EQ(entities.size(), expected_ids.size());

    std::map<int, int> seen;
    for (std::size_t i = 0; i < entities.size(); ++i) {
      const Entity& e = entities[i];
      if (i > 0) {
        EXPECT_LT(entities[i - 1].entity_id, e.entity_id);
      }
      EXPECT_EQ(e.entity_id, *std::min_element(e.member_marks.begin(), e.member_marks.end()));
      for (int m : e.member_marks) EXPECT_TRUE(seen.emplace(m, e.entity_id).second);
    }
    EXPECT_EQ(seen, g.owner);

    // Relations are symmetric, never reflexive, and come from some edge.
    std::map<int, const Entity*> by_id;
    for (const Entity& e : entities) by_id[e.entity_id] = &e;
    for (const Entity& e : entities) {
      for (int r : e.related_entities) {
        EXPECT_NE(r, e.entity_id);
        const auto& back = by_id.at(r)->related_entities;
        EXPECT_NE(std::find(back.begin(), back.end(), e.entity_id), back.end());
      }
    }
    std::set<std::pair<int, int>> edges;
    for (const Relationship& rel : g.result.relationships) {
      int a = g.owner[rel.from_mark], b = g.owner[rel.to_mark];
      if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
    }
    std::set<std::pair<int, int>> got;
    for (const Entity& e : entities) {
      for (int r : e.related_entities) got.insert({std::min(r, e.entity_id), std::max(r, e.entity_id)});
    }
    EXPECT_EQ(got, edges);
  }
}

}  // namespace
}  // namespace sbac
