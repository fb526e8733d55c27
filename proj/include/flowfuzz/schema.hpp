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

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flowfuzz/diag.hpp"
#include "flowfuzz/rng.hpp"

namespace flowfuzz {

// Input schema: per-column generation and validation constraints, parsed
// from a one-line config such as
//
//   number string[900xx],integer[0-120],integer[0-2^32]
//
// Column kinds: number string[<pattern>] (fixed-length digit string, 'x'
// positions are free digits), integer[<lo>-<hi>] (inclusive; 2^k endpoints
// accepted), float[<lo>-<hi>], enum[a|b|...], string[<maxlen>].

struct DigitPattern {
  std::string pattern;  // digits and 'x', non-empty
  bool operator==(const DigitPattern&) const = default;
};

struct IntRange {
  int64_t lo = 0;
  int64_t hi = 0;
  bool operator==(const IntRange&) const = default;
};

struct FloatRange {
  double lo = 0;
  double hi = 0;
  bool operator==(const FloatRange&) const = default;
};

struct EnumChoices {
  std::vector<std::string> choices;  // non-empty
  bool operator==(const EnumChoices&) const = default;
};

struct FreeString {
  size_t max_len = 0;
  bool operator==(const FreeString&) const = default;
};

using ColumnSpec = std::variant<DigitPattern, IntRange, FloatRange, EnumChoices, FreeString>;

struct Schema {
  char delimiter = ',';
  std::vector<ColumnSpec> columns;  // at least one
};

/// The six record-level schema-aware mutations, each mimicking a real error
/// shape, plus the byte-level baseline operations.
enum class MutationKind {
  InRangeReplace,   // M1: fresh valid value for the column
  OutOfRange,       // M2: value outside the declared range
  TypeChange,       // M3: non-numeric text or float-formatted int field
  DelimiterChange,  // M4: one row re-delimited with a different character
  ColumnCount,      // M5: drop or duplicate one column in one row
  EmptyField,       // M6: one field set to empty text
  ByteFlip,
  ByteReplace,
};

const char* to_string(MutationKind kind);

struct MutationDescriptor {
  MutationKind kind = MutationKind::InRangeReplace;
  int row = -1;
  int col = -1;  // -1 when the mutation has no column target
  std::string note;
};

struct Provenance {
  enum class Kind { Generated, Mutated };
  Kind kind = Kind::Generated;
  int parent_id = -1;  // corpus id of the mutation parent
  std::vector<MutationDescriptor> ops;
};

/// Raw text rows plus how they came to be.
struct TestInput {
  std::vector<std::string> rows;  // non-empty
  Provenance provenance;
};

ParseResult<Schema> parse_schema(std::string_view text);

/// True iff the line splits into exactly one field per column and every
/// field satisfies its ColumnSpec.
bool validate_row(const Schema& schema, std::string_view line);

/// n_rows rows that all pass validate_row; per-column uniform sampling
/// (every 'x' digit uniform in 0-9, integer ranges uniform inclusive).
TestInput generate_valid(const Schema& schema, Rng& rng, size_t n_rows);

/// A fresh valid field for one column; exposed for the M1 mutation and tests.
std::string generate_field(const ColumnSpec& column, Rng& rng);

/// Applies k independently chosen schema-aware mutations (uniform over the
/// six kinds, uniform row/column targets). Total: never fails, whatever the
/// input looks like. Provenance records the ops and the parent corpus id.
TestInput mutate(const Schema& schema, const TestInput& input, Rng& rng, int k,
                 int parent_id = -1);

enum class ByteMutateMode { Mixed, FlipOnly, ReplaceOnly };

/// Byte-level baseline: flips or replaces k random bytes across the
/// newline-joined rows. Length is preserved; row structure may not be.
TestInput random_byte_mutate(const TestInput& input, Rng& rng, int k,
                             ByteMutateMode mode = ByteMutateMode::Mixed, int parent_id = -1);

}  // namespace flowfuzz
