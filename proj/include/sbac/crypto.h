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

#ifndef SBAC_CRYPTO_H_
#define SBAC_CRYPTO_H_

#include <string>
#include <string_view>

namespace sbac {

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

std::string Base64Encode(std::string_view data);
// Throws Error(kInvalidArgument) on malformed input.
std::string Base64Decode(std::string_view text);

// True when `data` starts with the 8-byte PNG signature.
bool LooksLikePng(std::string_view data);

}  // namespace sbac

#endif  // SBAC_CRYPTO_H_
