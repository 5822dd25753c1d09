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

#ifndef SBAC_MARK_MODEL_H_
#define SBAC_MARK_MODEL_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbac/json_util.h"
#include "sbac/policy_model.h"

namespace sbac {

enum class SemanticRole { kSubject, kAction, kResource, kContext };

std::string_view ToString(SemanticRole role);
std::optional<SemanticRole> SemanticRoleFromString(std::string_view s);
// "Subject", "Action", ... as used in role-prefixed labels.
std::string_view DisplayName(SemanticRole role);

struct BoundingBox {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;

  bool operator==(const BoundingBox&) const = default;
};

// A canvas primitive as reported by the drawing surface, in z-order.
struct RawShape {
  std::string shape_id;
  std::string kind;
  BoundingBox bbox;
  std::optional<std::string> text;

  bool operator==(const RawShape&) const = default;
};

struct NumberedMark {
  int mark_number = 0;
  std::string shape_id;
  BoundingBox bbox;

  bool operator==(const NumberedMark&) const = default;
};

struct EnrichedMark {
  int mark_number = 0;
  SemanticRole role = SemanticRole::kSubject;
  std::string semantic_description;
  std::vector<int> related_marks;

  bool operator==(const EnrichedMark&) const = default;
};

struct MarkGroup {
  int representative_mark = 0;
  std::vector<int> member_marks;
  std::string group_label;
  SemanticRole group_role = SemanticRole::kSubject;

  bool operator==(const MarkGroup&) const = default;
};

enum class RelationshipType { kArrow, kContainment, kProximity };

struct Relationship {
  int from_mark = 0;
  int to_mark = 0;
  std::optional<std::string> label;
  RelationshipType type = RelationshipType::kArrow;

  bool operator==(const Relationship&) const = default;
};

struct IdentificationResult {
  std::vector<EnrichedMark> enriched_marks;
  std::vector<Relationship> relationships;
  std::vector<MarkGroup> groups;

  bool operator==(const IdentificationResult&) const = default;
};

// One semantic unit on the canvas: a group, or a mark that is in no group.
struct Entity {
  int entity_id = 0;
  SemanticRole role = SemanticRole::kSubject;
  std::string label;
  std::vector<int> member_marks;
  std::vector<int> related_entities;

  bool operator==(const Entity&) const = default;
};

// Mark i (1-based) is the i-th shape. Throws Error(kDuplicateShapeId).
std::vector<NumberedMark> AssignMarkNumbers(std::span<const RawShape> shapes);

ValidationReport ValidateIdentification(const IdentificationResult& result,
                                        std::span<const NumberedMark> marks);

// Entities ordered by id. Throws Error(kInvalidIdentification) when the
// result is not internally consistent.
std::vector<Entity> ConsolidateEntities(const IdentificationResult& result);

struct ResolvedRefs {
  std::vector<Entity> entities;          // first-seen order, no duplicates
  std::vector<std::string> unknown_refs;  // malformed or not on the canvas
};

ResolvedRefs ResolveElementRefs(std::span<const std::string> refs,
                                std::span<const Entity> entities);

// "[3] Subject: Alice"
std::string EntityLine(const Entity& entity);

std::set<int> MarkNumbers(std::span<const NumberedMark> marks);

// Removes element references to marks outside `known`. Returns one
// description per stripped reference, e.g. "policy2 [7]".
std::vector<std::string> StripDanglingElements(std::vector<Policy>& policies,
                                               const std::set<int>& known);
std::vector<std::string> DanglingElements(
    const std::vector<std::string>& elements, const std::set<int>& known);

Json ToJson(const RawShape& shape);
RawShape RawShapeFromJson(const Json& value, const std::string& path);
std::vector<RawShape> RawShapesFromJson(const Json& value,
                                        const std::string& path);
Json ToJson(const NumberedMark& mark);
NumberedMark NumberedMarkFromJson(const Json& value, const std::string& path);
Json ToJson(const Entity& entity);
Entity EntityFromJson(const Json& value, const std::string& path);

// Wire format of the identification response.
Json ToJson(const IdentificationResult& result);
IdentificationResult IdentificationFromJson(const Json& value,
                                            const std::string& path,
                                            UnknownFields mode);

}  // namespace sbac

#endif  // SBAC_MARK_MODEL_H_
