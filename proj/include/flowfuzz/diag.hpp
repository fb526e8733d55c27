/*
 * Copyright 2026 The FlowFuzz Authors.
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

#include <string>
#include <variant>

namespace flowfuzz {

/// Diagnostic codes shared by the pipeline, UDF, and schema parsers.
enum class DiagCode {
  Syntax,
  UnknownOperator,
  DanglingReference,
  DanglingUdf,
  ArityMismatch,
  Cycle,
  DuplicateName,
  MissingSink,
  UnknownBuiltin,
  UnboundVariable,
  UnknownColumnKind,
  MalformedRange,
  EmptyPattern,
};

const char* to_string(DiagCode code);

/// A parse-time error with a 1-based source position.
struct ParseDiagnostic {
  DiagCode code = DiagCode::Syntax;
  std::string message;
  int line = 0;
  int col = 0;

  std::string render() const;
};

/// Parsers return either the parsed artifact or a diagnostic.
template <typename T>
class [[nodiscard]] ParseResult {
 public:
  ParseResult(T value) : v_(std::move(value)) {}
  ParseResult(ParseDiagnostic diag) : v_(std::move(diag)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  T& value() { return std::get<T>(v_); }
  const T& value() const { return std::get<T>(v_); }
  T take_value() { return std::move(std::get<T>(v_)); }
  const ParseDiagnostic& diagnostic() const { return std::get<ParseDiagnostic>(v_); }

 private:
  std::variant<T, ParseDiagnostic> v_;
};

}  // namespace flowfuzz
