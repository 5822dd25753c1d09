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

#include "sbac/json_util.h"

#include <utility>

#include "sbac/errors.h"

namespace sbac {

ObjectReader::ObjectReader(const Json& value, std::string path)
    : value_(value), path_(std::move(path)) {
  if (!value_.is_object()) throw SchemaError(path_, "expected an object");
}

std::string ObjectReader::PathOf(std::string_view key) const {
  return path_ + "." + std::string(key);
}

bool ObjectReader::Has(std::string_view key) const {
  return value_.contains(std::string(key));
}

const Json& ObjectReader::Required(std::string_view key) {
  consumed_.emplace(key);
  auto it = value_.find(std::string(key));
  if (it == value_.end()) throw SchemaError(PathOf(key), "missing field");
  return *it;
}

const Json* ObjectReader::Optional(std::string_view key) {
  consumed_.emplace(key);
  auto it = value_.find(std::string(key));
  if (it == value_.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string ObjectReader::RequiredString(std::string_view key) {
  const Json& v = Required(key);
  if (!v.is_string()) throw SchemaError(PathOf(key), "expected a string");
  return v.get<std::string>();
}

std::string ObjectReader::RequiredNonEmptyString(std::string_view key) {
  std::string s = RequiredString(key);
  if (s.empty()) throw SchemaError(PathOf(key), "must not be empty");
  return s;
}

std::optional<std::string> ObjectReader::OptionalString(std::string_view key) {
  const Json* v = Optional(key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_string()) throw SchemaError(PathOf(key), "expected a string");
  return v->get<std::string>();
}

bool ObjectReader::RequiredBool(std::string_view key) {
  const Json& v = Required(key);
  if (!v.is_boolean()) throw SchemaError(PathOf(key), "expected a boolean");
  return v.get<bool>();
}

std::optional<bool> ObjectReader::OptionalBool(std::string_view key) {
  const Json* v = Optional(key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_boolean()) throw SchemaError(PathOf(key), "expected a boolean");
  return v->get<bool>();
}

std::int64_t ObjectReader::RequiredInt(std::string_view key) {
  const Json& v = Required(key);
  if (!v.is_number_integer()) {
    throw SchemaError(PathOf(key), "expected an integer");
  }
  return v.get<std::int64_t>();
}

double ObjectReader::RequiredNumber(std::string_view key) {
  const Json& v = Required(key);
  if (!v.is_number()) throw SchemaError(PathOf(key), "expected a number");
  return v.get<double>();
}

const Json& ObjectReader::RequiredArray(std::string_view key) {
  const Json& v = Required(key);
  if (!v.is_array()) throw SchemaError(PathOf(key), "expected an array");
  return v;
}

std::vector<std::string> ObjectReader::RequiredStringArray(
    std::string_view key) {
  return StringArrayAt(RequiredArray(key), PathOf(key));
}

std::optional<std::vector<std::string>> ObjectReader::OptionalStringArray(
    std::string_view key) {
  const Json* v = Optional(key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_array()) throw SchemaError(PathOf(key), "expected an array");
  return StringArrayAt(*v, PathOf(key));
}

std::vector<std::int64_t> ObjectReader::RequiredIntArray(
    std::string_view key) {
  const Json& arr = RequiredArray(key);
  std::vector<std::int64_t> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number_integer()) {
      throw SchemaError(IndexPath(PathOf(key), i), "expected an integer");
    }
    out.push_back(arr[i].get<std::int64_t>());
  }
  return out;
}

Json ObjectReader::Finish(UnknownFields mode) {
  Json extras = Json::object();
  for (auto it = value_.begin(); it != value_.end(); ++it) {
    if (consumed_.count(it.key()) != 0) continue;
    if (mode == UnknownFields::kReject) {
      throw SchemaError(PathOf(it.key()), "unknown field");
    }
    extras[it.key()] = it.value();
  }
  return extras;
}

std::string IndexPath(std::string_view base, std::size_t index) {
  return std::string(base) + "[" + std::to_string(index) + "]";
}

Json ParseJsonText(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
}

std::vector<std::string> StringArrayAt(const Json& value,
                                       const std::string& path) {
  if (!value.is_array()) throw SchemaError(path, "expected an array");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_string()) {
      throw SchemaError(IndexPath(path, i), "expected a string");
    }
    out.push_back(value[i].get<std::string>());
  }
  return out;
}

}  // namespace sbac
