// Copyright 2026 The Elicit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "elicit/error.hpp"
#include "json.hpp"

namespace elicit::detail {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// "line:col" for a byte offset into `text` (1-based).
std::string describe_offset(std::string_view text, std::size_t offset);

json parse_json(std::string_view text, const std::string& source);
json parse_json_file(const std::filesystem::path& path);

/// Required member lookup with a ParseError naming `where` on failure.
template <typename T>
T require(const json& obj, const char* key, const std::string& source,
          const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(source, where, std::string("missing field '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(source, where, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T optional_field(const json& obj, const char* key, T fallback, const std::string& source,
                 const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return require<T>(obj, key, source, where);
}

}  // namespace elicit::detail
