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

#include "sbac/http_api.h"

#include <functional>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "sbac/crypto.h"

namespace sbac {
namespace {

constexpr const char* kJson = "application/json";

void Send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

// Runs `fn` and maps library errors onto statuses.
void Guard(httplib::Response& res, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    int status = HttpStatusFor(e.code());
    if (status >= 500) spdlog::warn("request failed: {}", e.what());
    Send(res, status, ErrorBody(e));
  } catch (const Json::exception& e) {
    Send(res, 400, ErrorBody(Error(ErrorCode::kInvalidArgument, e.what())));
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    Send(res, 500, ErrorBody(Error(ErrorCode::kStorageError, e.what())));
  }
}

Json BodyJson(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json body = Json::parse(req.body);
  if (!body.is_object()) {
    Fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  }
  return body;
}

// JSON body, or multipart form where image parts are base64-encoded into
// the matching keys and text parts copied as strings.
Json ArgsFrom(const httplib::Request& req, std::initializer_list<const char*> images,
              std::initializer_list<const char*> texts) {
  if (!req.is_multipart_form_data()) return BodyJson(req);
  Json args = Json::object();
  for (const char* key : images) {
    if (req.has_file(key)) args[key] = Base64Encode(req.get_file_value(key).content);
  }
  for (const char* key : texts) {
    if (req.has_file(key)) args[key] = req.get_file_value(key).content;
  }
  return args;
}

std::string Param(const httplib::Request& req, const char* name) {
  auto it = req.path_params.find(name);
  return it == req.path_params.end() ? std::string() : it->second;
}

Json SessionView(const SessionState& s) {
  Json guidance = Json::array();
  for (const GuidanceCard& c : GuidanceDeck()) {
    guidance.push_back(Json{{"heading", std::string(c.heading)},
                            {"prompt", std::string(c.prompt)}});
  }
  return Json{{"state", ToJson(s)},
              {"callBudget", ToJson(ComputeCallBudget(s.call_log))},
              {"guidance", std::move(guidance)}};
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
    case ErrorCode::kUnknownInsight:
      return 404;
    case ErrorCode::kBusy:
    case ErrorCode::kIllegalTransition:
    case ErrorCode::kStageError:
      return 409;
    case ErrorCode::kAnalysisUnavailable:
    case ErrorCode::kClarifyUnavailable:
    case ErrorCode::kTestUnavailable:
    case ErrorCode::kIdentificationInvalid:
    case ErrorCode::kSchemaError:
    case ErrorCode::kRealizationInvalid:
      return 503;
    case ErrorCode::kTransportError:
    case ErrorCode::kTimeoutError:
    case ErrorCode::kFixtureMismatch:
      return 502;
    case ErrorCode::kStorageError:
    case ErrorCode::kMissingPlaceholder:
      return 500;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMalformedRationale:
    case ErrorCode::kEmptySegment:
    case ErrorCode::kDuplicateShapeId:
    case ErrorCode::kInvalidIdentification:
    case ErrorCode::kUnknownMarkReference:
    case ErrorCode::kDuplicateTypePrefixMismatch:
    case ErrorCode::kNoOpEdit:
      return 400;
  }
  return 500;
}

Json ErrorBody(const Error& error) {
  return Json{{"error", Json{{"code", ErrorCodeName(error.code())},
                             {"message", error.what()}}}};
}

void RegisterRoutes(httplib::Server& server, SessionService& service) {
  using httplib::Request;
  using httplib::Response;

  auto mutate = [&service](const char* op, auto make_args) {
    return [&service, op, make_args](const Request& req, Response& res) {
      Guard(res, [&] {
        Json view = service.Mutate(Param(req, "id"), op, make_args(req));
        Send(res, 200, view);
      });
    };
  };

  server.Get("/health", [](const Request&, Response& res) {
    Send(res, 200, Json{{"status", "ok"}});
  });

  server.Post("/sessions", [&service](const Request& req, Response& res) {
    Guard(res, [&] {
      Json body = BodyJson(req);
      SessionState s = service.Create(body.value("scenarioContext", ""));
      Send(res, 201, SessionView(s));
    });
  });

  server.Get("/sessions/:id", [&service](const Request& req, Response& res) {
    Guard(res, [&] { Send(res, 200, SessionView(service.Get(Param(req, "id")))); });
  });

  server.Get("/sessions/:id/sketch", [&service](const Request& req, Response& res) {
    Guard(res, [&] {
      SessionState s = service.Get(Param(req, "id"));
      Json shapes = Json::array();
      for (const RawShape& shape : s.sketch_snapshot) shapes.push_back(ToJson(shape));
      Json marks = Json::array();
      for (const NumberedMark& m : AssignMarkNumbers(s.sketch_snapshot)) {
        marks.push_back(ToJson(m));
      }
      Send(res, 200, Json{{"shapes", std::move(shapes)},
                          {"markMap", std::move(marks)},
                          {"sketchStale", s.sketch_stale}});
    });
  });

  server.Put("/sessions/:id/sketch",
             mutate("sketch", [](const Request& req) { return BodyJson(req); }));

  server.Post("/sessions/:id/identify", mutate("identify", [](const Request& req) {
                return ArgsFrom(req, {"raw", "numbered"}, {});
              }));

  server.Post("/sessions/:id/stage", mutate("stage", [](const Request& req) {
                return ArgsFrom(req, {"raw", "numbered"}, {"target"});
              }));

  server.Post("/sessions/:id/analyze", mutate("analyze", [](const Request& req) {
                return ArgsFrom(req, {"som"}, {});
              }));

  server.Post("/sessions/:id/insights/:iid/clarify",
              mutate("clarify", [](const Request& req) {
                Json args = BodyJson(req);
                args["insightId"] = Param(req, "iid");
                return args;
              }));

  for (const char* action : {"accept", "dismiss"}) {
    std::string path = std::string("/sessions/:id/insights/:iid/") + action;
    server.Post(path, mutate("insight", [action](const Request& req) {
                  return Json{{"insightId", Param(req, "iid")}, {"action", action}};
                }));
  }

  server.Patch("/sessions/:id/policies/:pid",
               mutate("policy_edit", [](const Request& req) {
                 Json args = BodyJson(req);
                 args["policyNumber"] = Param(req, "pid");
                 return args;
               }));

  server.Post("/sessions/:id/test",
              mutate("test", [](const Request&) { return Json::object(); }));

  server.Post("/sessions/:id/sketch-proposal",
              mutate("sketch_proposal", [](const Request& req) { return BodyJson(req); }));

  server.Post("/sessions/:id/shadow",
              mutate("shadow", [](const Request& req) { return BodyJson(req); }));

  server.Get("/sessions/:id/export", [&service](const Request& req, Response& res) {
    Guard(res, [&] { Send(res, 200, service.Export(Param(req, "id"))); });
  });
}

}  // namespace sbac
