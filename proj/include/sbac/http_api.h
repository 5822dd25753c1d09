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

#ifndef SBAC_HTTP_API_H_
#define SBAC_HTTP_API_H_

#include "sbac/errors.h"
#include "sbac/session_service.h"

namespace httplib {
class Server;
}

namespace sbac {

// 404 unknown session or card, 409 busy or illegal transition, 400 invalid
// input, 503 model output unusable, 502 model unreachable, 500 storage.
int HttpStatusFor(ErrorCode code);

// {"error": {"code": "...", "message": "..."}}
Json ErrorBody(const Error& error);

// Installs every route on `server`. `service` must outlive the server.
void RegisterRoutes(httplib::Server& server, SessionService& service);

}  // namespace sbac

#endif  // SBAC_HTTP_API_H_
