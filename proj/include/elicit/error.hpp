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

#include <stdexcept>
#include <string>

namespace elicit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be read or parsed. Carries the file and a
/// human-readable location (line:column, or line number for JSONL).
class ParseError : public Error {
 public:
  ParseError(std::string file, std::string location, const std::string& what)
      : Error(file + ":" + location + ": " + what),
        file_(std::move(file)),
        location_(std::move(location)) {}

  const std::string& file() const noexcept { return file_; }
  const std::string& location() const noexcept { return location_; }

 private:
  std::string file_;
  std::string location_;
};

/// Loaded data violates a structural invariant (duplicate ids, bad ranges).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent configuration (unset env var, unknown model id).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller passed an argument outside an operation's domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Failure attributable to one pipeline output; keeps the output id.
class OutputError : public Error {
 public:
  OutputError(std::string output_id, const std::string& what)
      : Error(output_id + ": " + what), output_id_(std::move(output_id)) {}

  const std::string& output_id() const noexcept { return output_id_; }

 private:
  std::string output_id_;
};

}  // namespace elicit
