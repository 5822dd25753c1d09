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

#include "sbac/session_service.h"

#include <algorithm>

#include <openssl/rand.h>
#include <spdlog/spdlog.h>

#include "sbac/analyze_engine.h"
#include "sbac/clarify_engine.h"
#include "sbac/crypto.h"
#include "sbac/engine_support.h"
#include "sbac/errors.h"
#include "sbac/prompts.h"
#include "sbac/responses.h"
#include "sbac/ripple_engine.h"
#include "sbac/transports.h"

namespace sbac {
namespace {

constexpr std::string_view kArchiveFormat = "sbac-session-archive/1";

std::string RandomId() {
  unsigned char bytes[16];
  if (RAND_bytes(bytes, sizeof bytes) != 1) {
    Fail(ErrorCode::kStorageError, "no randomness for a session id");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (unsigned char b : bytes) {
    id += kHex[b >> 4];
    id += kHex[b & 15];
  }
  return id;
}

std::string PngArg(const Json& args, const char* key) {
  if (!args.contains(key) || !args[key].is_string()) {
    Fail(ErrorCode::kInvalidArgument, std::string("missing image '") + key + "'");
  }
  std::string png = Base64Decode(args[key].get<std::string>());
  if (!LooksLikePng(png)) {
    Fail(ErrorCode::kInvalidArgument, std::string("'") + key + "' is not a PNG");
  }
  return png;
}

std::string StringArg(const Json& args, const char* key) {
  if (!args.contains(key) || !args[key].is_string()) {
    Fail(ErrorCode::kInvalidArgument, std::string("missing string '") + key + "'");
  }
  return args[key].get<std::string>();
}

bool BoolArg(const Json& args, const char* key) {
  if (!args.contains(key) || !args[key].is_boolean()) {
    Fail(ErrorCode::kInvalidArgument, std::string("missing boolean '") + key + "'");
  }
  return args[key].get<bool>();
}

std::string MarkMappingText(const std::vector<RawShape>& shapes,
                            const std::vector<NumberedMark>& mark_map) {
  Json marks = Json::array();
  for (std::size_t i = 0; i < mark_map.size(); ++i) {
    const NumberedMark& m = mark_map[i];
    const RawShape& s = shapes[i];
    marks.push_back(Json{{"mark", m.mark_number},
                         {"shapeId", m.shape_id},
                         {"type", s.kind},
                         {"name", s.text.value_or("")},
                         {"x", m.bbox.x},
                         {"y", m.bbox.y},
                         {"width", m.bbox.width},
                         {"height", m.bbox.height}});
  }
  return "Mark mapping (mark number -> shape metadata):\n" + marks.dump(2);
}

IdentificationResult ParseIdentificationFor(
    const std::vector<NumberedMark>& mark_map, std::string_view raw) {
  IdentificationResult result = ParseIdentification(raw);
  RequireValid(ValidateIdentification(result, mark_map), "identification");
  try {
    ConsolidateEntities(result);
  } catch (const Error& e) {
    throw SchemaError("$", e.what());
  }
  return result;
}

Json IdentificationView(const SessionState& session) {
  Json entities = Json::array();
  for (const Entity& e : session.entities) entities.push_back(ToJson(e));
  Json marks = Json::array();
  for (const NumberedMark& m : session.mark_map) marks.push_back(ToJson(m));
  return Json{{"identification", session.identification
                                     ? ToJson(*session.identification)
                                     : Json()},
              {"entities", std::move(entities)},
              {"markMap", std::move(marks)},
              {"statusNote", session.status_note}};
}

double NumberOr(const Json& obj, const char* key, double fallback) {
  return obj.contains(key) && obj[key].is_number() ? obj[key].get<double>()
                                                   : fallback;
}

BoundingBox DefaultBox(const Json& shape) {
  std::string type = shape.value("type", "rectangle");
  BoundingBox box;
  if (type == "arrow") {
    double x1 = NumberOr(shape, "x1", 0), y1 = NumberOr(shape, "y1", 0);
    double x2 = NumberOr(shape, "x2", x1), y2 = NumberOr(shape, "y2", y1);
    box.x = std::min(x1, x2);
    box.y = std::min(y1, y2);
    box.width = std::abs(x2 - x1);
    box.height = std::abs(y2 - y1);
    return box;
  }
  box.x = NumberOr(shape, "x", 0);
  box.y = NumberOr(shape, "y", 0);
  double w = 100, h = 100;
  if (type == "note") {
    w = h = 200;
  } else if (type == "text") {
    std::string text = shape.value("text", "");
    w = 12.0 * static_cast<double>(std::max<std::size_t>(1, text.size()));
    h = 32;
  } else if (type != "rectangle" && type != "ellipse") {
    h = 80;  // domain icon shapes
  }
  box.width = NumberOr(shape, "width", w);
  box.height = NumberOr(shape, "height", h);
  return box;
}

}  // namespace

void IdentifySketch(SessionState& session, const Gateway& gateway,
                    const std::string& raw_png, const std::string& numbered_png) {
  if (session.sketch_snapshot.empty()) {
    Fail(ErrorCode::kInvalidArgument, "the sketch is empty");
  }
  // Committed only with a valid identification, so the stored mark map
  // always matches the stored identification.
  std::vector<NumberedMark> marks = AssignMarkNumbers(session.sketch_snapshot);

  ChatRequest request;
  request.kind = session.identification ? CallKind::kReidentification
                                        : CallKind::kMarkIdentification;
  request.system_prompt = std::string(PromptText(PromptId::kMarkIdentification));
  request.user_turns.push_back(TextPart{MarkMappingText(session.sketch_snapshot, marks)});
  request.user_turns.push_back(ImagePart{raw_png, ImagePurpose::kUnannotated});
  request.user_turns.push_back(ImagePart{numbered_png, ImagePurpose::kNumbered});
  request.schema_id = std::string(ToString(SchemaId::kIdentification));

  AskOutcome outcome;
  auto result = AskValidated(
      gateway, session, std::move(request),
      [&](const std::string& raw) { return ParseIdentificationFor(marks, raw); },
      /*reasks=*/1, &outcome);
  if (!result) {
    session.status_note = "identification failed: " + outcome.last_violation;
    session.audit_log.push_back({"identification_invalid", outcome.last_violation});
    Fail(ErrorCode::kIdentificationInvalid, outcome.last_violation);
  }
  session.mark_map = std::move(marks);
  session.identification = std::move(*result);
  session.entities = ConsolidateEntities(*session.identification);
  session.sketch_stale = false;

  std::set<int> known = KnownMarks(session);
  std::vector<std::string> stripped = StripDanglingElements(session.policies, known);
  session.insights.RefreshDangling(known);
  session.vignettes.RefreshDangling(known);
  session.status_note.clear();
  if (!stripped.empty()) {
    std::string list;
    for (const std::string& s : stripped) list += (list.empty() ? "" : ", ") + s;
    session.status_note = "removed references to erased marks: " + list;
  }
  session.audit_log.push_back(
      {"identification", std::to_string(session.mark_map.size()) + " marks, " +
                             std::to_string(session.entities.size()) + " entities"});
}

void ApplySketchEvents(std::vector<RawShape>& shapes, const Json& events) {
  auto find = [&](const std::string& id) {
    return std::find_if(shapes.begin(), shapes.end(),
                        [&](const RawShape& s) { return s.shape_id == id; });
  };
  for (const Json& e : events) {
    std::string type = e.value("type", "");
    if (type == "create") {
      const Json& shape = e.at("shape");
      RawShape s;
      s.shape_id = shape.value("shapeId", "");
      s.kind = shape.value("type", "rectangle");
      s.bbox = DefaultBox(shape);
      if (shape.contains("text") && shape["text"].is_string()) {
        s.text = shape["text"].get<std::string>();
      }
      if (s.shape_id.empty() || find(s.shape_id) != shapes.end()) {
        Fail(ErrorCode::kDuplicateShapeId, "cannot create shape '" + s.shape_id + "'");
      }
      shapes.push_back(std::move(s));
    } else if (type == "edit" || type == "move" || type == "delete") {
      std::string id = e.value("shapeId", "");
      auto it = find(id);
      if (it == shapes.end()) {
        spdlog::warn("sketch event {} on unknown shape '{}' skipped", type, id);
        continue;
      }
      if (type == "delete") {
        shapes.erase(it);
      } else if (type == "move") {
        it->bbox.x = NumberOr(e, "x", it->bbox.x);
        it->bbox.y = NumberOr(e, "y", it->bbox.y);
      } else {
        if (e.contains("text") && e["text"].is_string()) {
          it->text = e["text"].get<std::string>();
        }
        it->bbox.width = NumberOr(e, "width", it->bbox.width);
        it->bbox.height = NumberOr(e, "height", it->bbox.height);
      }
    }
  }
}

Json ApplyOperation(SessionState& session, const Gateway& gateway,
                    const ServiceOptions& options, std::string_view op,
                    const Json& args) {
  if (!args.is_object()) Fail(ErrorCode::kInvalidArgument, "arguments must be an object");

  if (op == "create") {
    session.scenario_context = args.value("scenarioContext", "");
    return ToJson(session);
  }
  if (op == "sketch") {
    if (!args.contains("shapes")) Fail(ErrorCode::kInvalidArgument, "missing 'shapes'");
    std::vector<RawShape> shapes;
    try {
      shapes = RawShapesFromJson(args["shapes"], "shapes");
    } catch (const SchemaError& e) {
      Fail(ErrorCode::kInvalidArgument, e.what());
    }
    std::vector<NumberedMark> preview = AssignMarkNumbers(shapes);
    bool changed = shapes != session.sketch_snapshot;
    session.sketch_snapshot = std::move(shapes);
    if (changed && session.identification) session.sketch_stale = true;
    Json marks = Json::array();
    for (const NumberedMark& m : preview) marks.push_back(ToJson(m));
    return Json{{"sketchStale", session.sketch_stale}, {"markMap", std::move(marks)}};
  }
  if (op == "identify") {
    if (session.stage == Stage::kSpecify) {
      Fail(ErrorCode::kStageError, "identification runs when entering analyze");
    }
    IdentifySketch(session, gateway, PngArg(args, "raw"), PngArg(args, "numbered"));
    return IdentificationView(session);
  }
  if (op == "stage") {
    std::optional<Stage> target = StageFromString(StringArg(args, "target"));
    if (!target) Fail(ErrorCode::kInvalidArgument, "unknown stage");
    if (!IsLegalTransition(session.stage, *target)) {
      Fail(ErrorCode::kIllegalTransition,
           "cannot go from " + std::string(ToString(session.stage)) + " to " +
               std::string(ToString(*target)));
    }
    std::string raw = PngArg(args, "raw");
    std::string numbered = PngArg(args, "numbered");
    IdentifySketch(session, gateway, raw, numbered);
    session.stage = *target;
    session.audit_log.push_back({"stage", std::string(ToString(*target))});
    Json view = IdentificationView(session);
    view["stage"] = ToString(session.stage);
    if (*target == Stage::kTest) {
      view["test"] = ToJson(RunTestPipeline(session, gateway, options.vignette_k));
    }
    return view;
  }
  if (op == "analyze") {
    AnalyzeResponse r = RunAnalysis(session, gateway, PngArg(args, "som"));
    Json view = ToJson(r);
    view["insightLedger"] = session.insights.ToJson();
    view["pendingSketchProposal"] = session.pending_sketch_proposal
                                        ? ToJson(*session.pending_sketch_proposal)
                                        : Json();
    view["sketchStale"] = session.sketch_stale;
    return view;
  }
  if (op == "clarify") {
    ClarifyOutcome outcome = Clarify(session, gateway, StringArg(args, "insightId"),
                                     StringArg(args, "message"));
    Json view = ToJson(outcome);
    view["pendingSketchProposal"] = session.pending_sketch_proposal
                                        ? ToJson(*session.pending_sketch_proposal)
                                        : Json();
    view["shadow"] = session.shadow ? ToJson(*session.shadow) : Json();
    view["statusNote"] = session.status_note;
    return view;
  }
  if (op == "insight") {
    std::string id = StringArg(args, "insightId");
    std::string action = StringArg(args, "action");
    if (action != "accept" && action != "dismiss") {
      Fail(ErrorCode::kInvalidArgument, "action must be accept or dismiss");
    }
    SetInsightState(session, id,
                    action == "accept" ? InsightAction::kAccept : InsightAction::kDismiss);
    const LedgerEntry* e = session.insights.Find(id);
    if (!e) e = session.vignettes.Find(id);
    return Json{{"id", id}, {"lifecycle", ToString(e->lifecycle)}};
  }
  if (op == "policy_edit") {
    std::optional<PolicyField> field = PolicyFieldFromString(StringArg(args, "field"));
    if (!field) Fail(ErrorCode::kInvalidArgument, "unknown policy field");
    if (session.stage == Stage::kSpecify) {
      Fail(ErrorCode::kStageError, "there are no policies before analysis");
    }
    return ToJson(ApplyPolicyEdit(session, gateway, StringArg(args, "policyNumber"),
                                  *field, StringArg(args, "value")));
  }
  if (op == "test") {
    return ToJson(RunTestPipeline(session, gateway, options.vignette_k));
  }
  if (op == "sketch_proposal") {
    bool accept = BoolArg(args, "accept");
    if (!session.pending_sketch_proposal) {
      Fail(ErrorCode::kNotFound, "no sketch proposal pending");
    }
    SketchProposal proposal = *std::move(session.pending_sketch_proposal);
    session.pending_sketch_proposal.reset();
    if (accept && !proposal.events.empty()) {
      ApplySketchEvents(session.sketch_snapshot, proposal.events);
      if (session.identification) session.sketch_stale = true;
    }
    session.audit_log.push_back(
        {accept ? "sketch_proposal_accepted" : "sketch_proposal_declined",
         proposal.directive});
    Json shapes = Json::array();
    for (const RawShape& s : session.sketch_snapshot) shapes.push_back(ToJson(s));
    return Json{{"accepted", accept},
                {"directive", proposal.directive},
                {"sketch", std::move(shapes)},
                {"sketchStale", session.sketch_stale}};
  }
  if (op == "shadow") {
    bool accept = BoolArg(args, "accept");
    ResolveShadow(session, accept);
    return Json{{"accepted", accept}, {"policies", PoliciesToJson(session.policies)}};
  }
  Fail(ErrorCode::kInvalidArgument, "unknown operation " + std::string(op));
}

Json ExportArchive(const SessionState& session) {
  Json fixtures = Json::array();
  for (const Fixture& f : FixturesFromCallLog(session.call_log)) {
    fixtures.push_back(ToJson(f));
  }
  return Json{{"format", kArchiveFormat},
              {"state", ToJson(session)},
              {"fixtures", std::move(fixtures)},
              {"callBudget", ToJson(ComputeCallBudget(session.call_log))},
              {"diagnostics", session.test_diagnostics}};
}

SessionState ReplayArchive(const Json& archive, const ServiceOptions& options) {
  if (!archive.is_object() || archive.value("format", "") != kArchiveFormat) {
    Fail(ErrorCode::kInvalidArgument, "not a session archive");
  }
  SessionState recorded = SessionStateFromJson(archive.at("state"));
  std::vector<Fixture> fixtures;
  const Json& list = archive.at("fixtures");
  for (std::size_t i = 0; i < list.size(); ++i) {
    fixtures.push_back(FixtureFromJson(list[i], IndexPath("fixtures", i)));
  }
  auto transport = std::make_shared<ReplayTransport>(std::move(fixtures), true);
  GatewayOptions gw;
  gw.retry_budget = 0;
  Gateway gateway(transport, gw);

  SessionState state = NewSession(recorded.session_id, "");
  for (std::size_t i = 0; i < recorded.journal.size(); ++i) {
    const JournalEntry& entry = recorded.journal[i];
    std::optional<std::string> error;
    try {
      ApplyOperation(state, gateway, options, entry.op, entry.args);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kFixtureMismatch) throw;
      error = std::string(ErrorCodeName(e.code()));
    }
    if (error != entry.error) {
      Fail(ErrorCode::kFixtureMismatch,
           "journal entry " + std::to_string(i) + " (" + entry.op + ") ended with " +
               error.value_or("success") + ", archive says " +
               entry.error.value_or("success"));
    }
    state.journal.push_back(entry);
  }
  return state;
}

SessionService::SessionService(SessionStore& store, const Gateway& gateway,
                               ServiceOptions options)
    : store_(store), gateway_(gateway), options_(std::move(options)) {}

SessionState SessionService::Create(const std::string& scenario_context) {
  std::string id = options_.id_generator ? options_.id_generator() : RandomId();
  if (!IsValidSessionId(id)) Fail(ErrorCode::kStorageError, "bad generated id");
  if (store_.Load(id)) Fail(ErrorCode::kStorageError, "session id collision");
  SessionState state = NewSession(id, "");
  Json args = Json{{"scenarioContext", scenario_context}};
  ApplyOperation(state, gateway_, options_, "create", args);
  state.journal.push_back(JournalEntry{"create", args, std::nullopt});
  store_.Save(state);
  spdlog::info("session {} created", id);
  return state;
}

SessionState SessionService::Get(std::string_view id) const {
  std::optional<SessionState> state = store_.Load(id);
  if (!state) Fail(ErrorCode::kNotFound, "no session " + std::string(id));
  return *std::move(state);
}

std::shared_ptr<std::mutex> SessionService::LockFor(std::string_view id) {
  std::lock_guard<std::mutex> lock(locks_mu_);
  auto it = locks_.find(id);
  if (it == locks_.end()) {
    it = locks_.emplace(std::string(id), std::make_shared<std::mutex>()).first;
  }
  return it->second;
}

Json SessionService::Mutate(std::string_view id, std::string_view op,
                            const Json& args) {
  std::shared_ptr<std::mutex> mu = LockFor(id);
  std::unique_lock<std::mutex> lock(*mu, std::try_to_lock);
  if (!lock.owns_lock()) {
    Fail(ErrorCode::kBusy, "session " + std::string(id) + " is busy");
  }
  const SessionState before = Get(id);
  SessionState work = before;
  try {
    Json view = ApplyOperation(work, gateway_, options_, op, args);
    work.journal.push_back(JournalEntry{std::string(op), args, std::nullopt});
    store_.Save(work);
    return view;
  } catch (const Error& e) {
    // Keep whatever the failed operation legitimately recorded (model calls,
    // status notes) so that the session stays replayable.
    if (work != before && e.code() != ErrorCode::kStorageError) {
      work.journal.push_back(JournalEntry{std::string(op), args,
                                          std::string(ErrorCodeName(e.code()))});
      store_.Save(work);
    }
    throw;
  }
}

Json SessionService::Export(std::string_view id) const {
  return ExportArchive(Get(id));
}

}  // namespace sbac
