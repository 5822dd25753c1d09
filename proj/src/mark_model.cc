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

#include "sbac/mark_model.h"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "sbac/errors.h"

namespace sbac {
namespace {

int PositiveMark(ObjectReader& r, std::string_view key) {
  std::int64_t v = r.RequiredInt(key);
  if (v <= 0 || v > 1'000'000) {
    throw SchemaError(r.PathOf(key), "mark numbers are positive integers");
  }
  return static_cast<int>(v);
}

std::vector<int> PositiveMarks(ObjectReader& r, std::string_view key) {
  std::vector<int> out;
  for (std::int64_t v : r.RequiredIntArray(key)) {
    if (v <= 0 || v > 1'000'000) {
      throw SchemaError(r.PathOf(key), "mark numbers are positive integers");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

SemanticRole RoleAt(ObjectReader& r, std::string_view key) {
  std::string s = r.RequiredString(key);
  std::optional<SemanticRole> role = SemanticRoleFromString(s);
  if (!role) throw SchemaError(r.PathOf(key), "unknown role \"" + s + "\"");
  return *role;
}

std::string_view ToString(RelationshipType type) {
  switch (type) {
    case RelationshipType::kArrow: return "arrow";
    case RelationshipType::kContainment: return "containment";
    case RelationshipType::kProximity: return "proximity";
  }
  return "arrow";
}

std::optional<RelationshipType> RelationshipTypeFromString(std::string_view s) {
  if (s == "arrow") return RelationshipType::kArrow;
  if (s == "containment") return RelationshipType::kContainment;
  if (s == "proximity") return RelationshipType::kProximity;
  return std::nullopt;
}

// Structural checks that do not depend on the canvas mark map.
ValidationReport StructuralViolations(const IdentificationResult& result,
                                      const std::set<int>* known) {
  ValidationReport report;
  auto check_known = [&](int mark, const std::string& path) {
    if (known != nullptr && known->count(mark) == 0) {
      report.push_back({path, "unknown mark " + std::to_string(mark)});
    }
  };

  std::set<int> enriched_seen;
  for (std::size_t i = 0; i < result.enriched_marks.size(); ++i) {
    const EnrichedMark& m = result.enriched_marks[i];
    std::string path = IndexPath("enrichedMarks", i);
    if (!enriched_seen.insert(m.mark_number).second) {
      report.push_back({path, "duplicate enriched mark " +
                                  std::to_string(m.mark_number)});
    }
    check_known(m.mark_number, path + ".markNumber");
    for (std::size_t j = 0; j < m.related_marks.size(); ++j) {
      check_known(m.related_marks[j], IndexPath(path + ".relatedMarks", j));
    }
  }

  for (std::size_t i = 0; i < result.relationships.size(); ++i) {
    const Relationship& rel = result.relationships[i];
    std::string path = IndexPath("relationships", i);
    if (rel.from_mark == rel.to_mark) {
      report.push_back({path, "self-relationship on mark " +
                                  std::to_string(rel.from_mark)});
    }
    check_known(rel.from_mark, path + ".fromMark");
    check_known(rel.to_mark, path + ".toMark");
  }

  std::map<int, std::size_t> owner;
  for (std::size_t i = 0; i < result.groups.size(); ++i) {
    const MarkGroup& g = result.groups[i];
    std::string path = IndexPath("groups", i);
    if (g.member_marks.empty()) {
      report.push_back({path, "empty group"});
      continue;
    }
    int lowest = *std::min_element(g.member_marks.begin(), g.member_marks.end());
    if (std::find(g.member_marks.begin(), g.member_marks.end(),
                  g.representative_mark) == g.member_marks.end()) {
      report.push_back({path + ".representativeMark",
                        "representative not a member"});
    } else if (g.representative_mark != lowest) {
      report.push_back({path + ".representativeMark",
                        "representative not lowest"});
    }
    std::set<int> local;
    for (std::size_t j = 0; j < g.member_marks.size(); ++j) {
      int mark = g.member_marks[j];
      std::string mpath = IndexPath(path + ".memberMarks", j);
      check_known(mark, mpath);
      if (!local.insert(mark).second) {
        report.push_back({mpath, "mark listed twice in group"});
        continue;
      }
      auto [it, inserted] = owner.emplace(mark, i);
      if (!inserted) {
        report.push_back({mpath, "overlapping groups (mark " +
                                     std::to_string(mark) + " also in " +
                                     IndexPath("groups", it->second) + ")"});
      }
    }
  }
  return report;
}

}  // namespace

std::string_view ToString(SemanticRole role) {
  switch (role) {
    case SemanticRole::kSubject: return "subject";
    case SemanticRole::kAction: return "action";
    case SemanticRole::kResource: return "resource";
    case SemanticRole::kContext: return "context";
  }
  return "subject";
}

std::optional<SemanticRole> SemanticRoleFromString(std::string_view s) {
  if (s == "subject") return SemanticRole::kSubject;
  if (s == "action") return SemanticRole::kAction;
  if (s == "resource") return SemanticRole::kResource;
  if (s == "context") return SemanticRole::kContext;
  return std::nullopt;
}

std::string_view DisplayName(SemanticRole role) {
  switch (role) {
    case SemanticRole::kSubject: return "Subject";
    case SemanticRole::kAction: return "Action";
    case SemanticRole::kResource: return "Resource";
    case SemanticRole::kContext: return "Context";
  }
  return "Subject";
}

std::vector<NumberedMark> AssignMarkNumbers(std::span<const RawShape> shapes) {
  std::unordered_set<std::string> seen;
  std::vector<NumberedMark> marks;
  marks.reserve(shapes.size());
  for (const RawShape& shape : shapes) {
    if (!seen.insert(shape.shape_id).second) {
      Fail(ErrorCode::kDuplicateShapeId, "duplicate shapeId " + shape.shape_id);
    }
    marks.push_back({static_cast<int>(marks.size()) + 1, shape.shape_id,
                     shape.bbox});
  }
  return marks;
}

ValidationReport ValidateIdentification(const IdentificationResult& result,
                                        std::span<const NumberedMark> marks) {
  std::set<int> known = MarkNumbers(marks);
  return StructuralViolations(result, &known);
}

std::vector<Entity> ConsolidateEntities(const IdentificationResult& result) {
  ValidationReport report = StructuralViolations(result, nullptr);
  if (!report.empty()) {
    Fail(ErrorCode::kInvalidIdentification, Describe(report));
  }

  std::map<int, int> entity_of;  // mark -> entity id
  std::map<int, Entity> entities;
  for (const MarkGroup& g : result.groups) {
    Entity e;
    e.entity_id = g.representative_mark;
    e.role = g.group_role;
    e.label = g.group_label;
    e.member_marks = g.member_marks;
    std::sort(e.member_marks.begin(), e.member_marks.end());
    for (int m : e.member_marks) entity_of[m] = e.entity_id;
    entities.emplace(e.entity_id, std::move(e));
  }
  for (const EnrichedMark& m : result.enriched_marks) {
    if (entity_of.count(m.mark_number) != 0) continue;
    Entity e;
    e.entity_id = m.mark_number;
    e.role = m.role;
    e.label = m.semantic_description;
    e.member_marks = {m.mark_number};
    entity_of[m.mark_number] = e.entity_id;
    entities.emplace(e.entity_id, std::move(e));
  }

  std::map<int, std::set<int>> adjacency;
  auto link = [&](int a, int b) {
    auto ea = entity_of.find(a);
    auto eb = entity_of.find(b);
    if (ea == entity_of.end() || eb == entity_of.end()) return;
    if (ea->second == eb->second) return;
    adjacency[ea->second].insert(eb->second);
    adjacency[eb->second].insert(ea->second);
  };
  for (const EnrichedMark& m : result.enriched_marks) {
    for (int r : m.related_marks) link(m.mark_number, r);
  }
  for (const Relationship& rel : result.relationships) {
    link(rel.from_mark, rel.to_mark);
  }

  std::vector<Entity> out;
  out.reserve(entities.size());
  for (auto& [id, e] : entities) {
    const std::set<int>& adj = adjacency[id];
    e.related_entities.assign(adj.begin(), adj.end());
    out.push_back(std::move(e));
  }
  return out;
}

ResolvedRefs ResolveElementRefs(std::span<const std::string> refs,
                                std::span<const Entity> entities) {
  ResolvedRefs out;
  std::set<int> added;
  for (const std::string& ref : refs) {
    std::optional<int> mark = ParseMarkRef(ref);
    const Entity* found = nullptr;
    if (mark) {
      for (const Entity& e : entities) {
        if (std::find(e.member_marks.begin(), e.member_marks.end(), *mark) !=
            e.member_marks.end()) {
          found = &e;
          break;
        }
      }
    }
    if (found == nullptr) {
      out.unknown_refs.push_back(ref);
    } else if (added.insert(found->entity_id).second) {
      out.entities.push_back(*found);
    }
  }
  return out;
}

std::string EntityLine(const Entity& entity) {
  return MarkRef(entity.entity_id) + " " + std::string(DisplayName(entity.role)) +
         ": " + entity.label;
}

std::set<int> MarkNumbers(std::span<const NumberedMark> marks) {
  std::set<int> out;
  for (const NumberedMark& m : marks) out.insert(m.mark_number);
  return out;
}

std::vector<std::string> DanglingElements(
    const std::vector<std::string>& elements, const std::set<int>& known) {
  std::vector<std::string> out;
  for (const std::string& ref : elements) {
    std::optional<int> mark = ParseMarkRef(ref);
    if (!mark || known.count(*mark) == 0) out.push_back(ref);
  }
  return out;
}

std::vector<std::string> StripDanglingElements(std::vector<Policy>& policies,
                                               const std::set<int>& known) {
  std::vector<std::string> stripped;
  for (Policy& p : policies) {
    std::vector<std::string> kept;
    for (const std::string& ref : p.elements) {
      std::optional<int> mark = ParseMarkRef(ref);
      if (mark && known.count(*mark) != 0) {
        kept.push_back(ref);
      } else {
        stripped.push_back(p.policy_number + " " + ref);
      }
    }
    p.elements = std::move(kept);
  }
  return stripped;
}

Json ToJson(const RawShape& shape) {
  Json out = Json::object();
  out["shapeId"] = shape.shape_id;
  out["kind"] = shape.kind;
  out["x"] = shape.bbox.x;
  out["y"] = shape.bbox.y;
  out["width"] = shape.bbox.width;
  out["height"] = shape.bbox.height;
  if (shape.text) out["text"] = *shape.text;
  return out;
}

RawShape RawShapeFromJson(const Json& value, const std::string& path) {
  ObjectReader r(value, path);
  RawShape s;
  s.shape_id = r.RequiredNonEmptyString("shapeId");
  s.kind = r.RequiredNonEmptyString("kind");
  s.bbox.x = r.RequiredNumber("x");
  s.bbox.y = r.RequiredNumber("y");
  s.bbox.width = r.RequiredNumber("width");
  s.bbox.height = r.RequiredNumber("height");
  if (s.bbox.width < 0 || s.bbox.height < 0) {
    throw SchemaError(path, "width and height must be non-negative");
  }
  s.text = r.OptionalString("text");
  r.Finish(UnknownFields::kReject);
  return s;
}

std::vector<RawShape> RawShapesFromJson(const Json& value,
                                        const std::string& path) {
  if (!value.is_array()) throw SchemaError(path, "expected an array");
  std::vector<RawShape> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(RawShapeFromJson(value[i], IndexPath(path, i)));
  }
  return out;
}

Json ToJson(const NumberedMark& mark) {
  return Json{{"markNumber", mark.mark_number},
              {"shapeId", mark.shape_id},
              {"x", mark.bbox.x},
              {"y", mark.bbox.y},
              {"width", mark.bbox.width},
              {"height", mark.bbox.height}};
}

NumberedMark NumberedMarkFromJson(const Json& value, const std::string& path) {
  ObjectReader r(value, path);
  NumberedMark m;
  m.mark_number = PositiveMark(r, "markNumber");
  m.shape_id = r.RequiredString("shapeId");
  m.bbox.x = r.RequiredNumber("x");
  m.bbox.y = r.RequiredNumber("y");
  m.bbox.width = r.RequiredNumber("width");
  m.bbox.height = r.RequiredNumber("height");
  r.Finish(UnknownFields::kReject);
  return m;
}

Json ToJson(const Entity& entity) {
  return Json{{"entityId", entity.entity_id},
              {"role", ToString(entity.role)},
              {"label", entity.label},
              {"memberMarks", entity.member_marks},
              {"relatedEntities", entity.related_entities}};
}

Entity EntityFromJson(const Json& value, const std::string& path) {
  ObjectReader r(value, path);
  Entity e;
  e.entity_id = PositiveMark(r, "entityId");
  e.role = RoleAt(r, "role");
  e.label = r.RequiredString("label");
  e.member_marks = PositiveMarks(r, "memberMarks");
  e.related_entities = PositiveMarks(r, "relatedEntities");
  r.Finish(UnknownFields::kReject);
  return e;
}

Json ToJson(const IdentificationResult& result) {
  Json enriched = Json::array();
  for (const EnrichedMark& m : result.enriched_marks) {
    enriched.push_back(Json{{"markNumber", m.mark_number},
                            {"semanticRole", ToString(m.role)},
                            {"semanticDescription", m.semantic_description},
                            {"relatedMarks", m.related_marks}});
  }
  Json relationships = Json::array();
  for (const Relationship& rel : result.relationships) {
    Json j = Json{{"fromMark", rel.from_mark}, {"toMark", rel.to_mark}};
    if (rel.label) j["label"] = *rel.label;
    j["type"] = ToString(rel.type);
    relationships.push_back(std::move(j));
  }
  Json groups = Json::array();
  for (const MarkGroup& g : result.groups) {
    groups.push_back(Json{{"representativeMark", g.representative_mark},
                          {"memberMarks", g.member_marks},
                          {"groupLabel", g.group_label},
                          {"groupRole", ToString(g.group_role)}});
  }
  return Json{{"enrichedMarks", std::move(enriched)},
              {"relationships", std::move(relationships)},
              {"groups", std::move(groups)}};
}

IdentificationResult IdentificationFromJson(const Json& value,
                                            const std::string& path,
                                            UnknownFields mode) {
  ObjectReader r(value, path);
  IdentificationResult out;
  const Json& enriched = r.RequiredArray("enrichedMarks");
  for (std::size_t i = 0; i < enriched.size(); ++i) {
    ObjectReader m(enriched[i], IndexPath(r.PathOf("enrichedMarks"), i));
    EnrichedMark em;
    em.mark_number = PositiveMark(m, "markNumber");
    em.role = RoleAt(m, "semanticRole");
    em.semantic_description = m.RequiredString("semanticDescription");
    if (m.Optional("relatedMarks") != nullptr) {
      em.related_marks = PositiveMarks(m, "relatedMarks");
    }
    m.Finish(mode);
    out.enriched_marks.push_back(std::move(em));
  }
  if (const Json* rels = r.Optional("relationships")) {
    if (!rels->is_array()) {
      throw SchemaError(r.PathOf("relationships"), "expected an array");
    }
    for (std::size_t i = 0; i < rels->size(); ++i) {
      ObjectReader m((*rels)[i], IndexPath(r.PathOf("relationships"), i));
      Relationship rel;
      rel.from_mark = PositiveMark(m, "fromMark");
      rel.to_mark = PositiveMark(m, "toMark");
      rel.label = m.OptionalString("label");
      std::string type = m.RequiredString("type");
      std::optional<RelationshipType> t = RelationshipTypeFromString(type);
      if (!t) {
        throw SchemaError(m.PathOf("type"),
                          "unknown relationship type \"" + type + "\"");
      }
      rel.type = *t;
      m.Finish(mode);
      out.relationships.push_back(std::move(rel));
    }
  }
  if (const Json* groups = r.Optional("groups")) {
    if (!groups->is_array()) {
      throw SchemaError(r.PathOf("groups"), "expected an array");
    }
    for (std::size_t i = 0; i < groups->size(); ++i) {
      ObjectReader m((*groups)[i], IndexPath(r.PathOf("groups"), i));
      MarkGroup g;
      g.representative_mark = PositiveMark(m, "representativeMark");
      g.member_marks = PositiveMarks(m, "memberMarks");
      g.group_label = m.RequiredString("groupLabel");
      g.group_role = RoleAt(m, "groupRole");
      m.Finish(mode);
      out.groups.push_back(std::move(g));
    }
  }
  r.Finish(mode);
  return out;
}

}  // namespace sbac
