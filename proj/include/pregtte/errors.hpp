/*
 * Copyright 2026 The pregtte Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace pregtte {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside its domain (probability not in [0,1], negative count, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Structured-text input that violates its schema. Carries the offending line and field.
class SchemaError : public Error {
 public:
  SchemaError(std::string source, int line, std::string field, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + (field.empty() ? "" : "'" + field + "': ") + what),
        source_(std::move(source)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string source_;
  int line_;
  std::string field_;
};

/// Graph or design-matrix structure that makes a computation undefined
/// (cycles, rank deficiency, unknown node labels).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Inputs are individually valid but mutually inconsistent
/// (design window outside protocol window, 4A without ground truth, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a trustworthy answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File-system failure or a refusal to overwrite existing output.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pregtte
