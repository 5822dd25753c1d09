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

#ifndef SBAC_JSON_UTIL_H_
#define SBAC_JSON_UTIL_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sbac {

using Json = nlohmann::ordered_json;

// How a reader treats object keys it was not asked about.
enum class UnknownFields {
  kReject,    // model output: any extra key is a schema violation
  kPreserve,  // stored documents: extras are carried through untouched
};

// Strict accessor over one JSON object. Every lookup records the key as
// consumed so that Finish() can reject (or collect) whatever is left.
// All failures are SchemaError with a JSONPath-like location.
class ObjectReader {
 public:
  ObjectReader(const Json& value, std::string path);

  const std::string& path() const { return path_; }
  std::string PathOf(std::string_view key) const;

  bool Has(std::string_view key) const;
  const Json& Required(std::string_view key);
  // Absent and null are both reported as nullptr.
  const Json* Optional(std::string_view key);

  std::string RequiredString(std::string_view key);
  std::string RequiredNonEmptyString(std::string_view key);
  std::optional<std::string> OptionalString(std::string_view key);
  bool RequiredBool(std::string_view key);
  std::optional<bool> OptionalBool(std::string_view key);
  std::int64_t RequiredInt(std::string_view key);
  double RequiredNumber(std::string_view key);
  std::vector<std::string> RequiredStringArray(std::string_view key);
  std::optional<std::vector<std::string>> OptionalStringArray(
      std::string_view key);
  std::vector<std::int64_t> RequiredIntArray(std::string_view key);
  const Json& RequiredArray(std::string_view key);

  // Returns the unconsumed members (kPreserve) or throws on the first one
  // (kReject).
  Json Finish(UnknownFields mode);

 private:
  const Json& value_;
  std::string path_;
  std::set<std::string, std::less<>> consumed_;
};

std::string IndexPath(std::string_view base, std::size_t index);

// Parses text as JSON, mapping syntax errors to SchemaError at "$".
Json ParseJsonText(std::string_view text);

std::vector<std::string> StringArrayAt(const Json& value,
                                       const std::string& path);

}  // namespace sbac

#endif  // SBAC_JSON_UTIL_H_
