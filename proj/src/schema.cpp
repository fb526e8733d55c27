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

#include "flowfuzz/schema.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace flowfuzz {

namespace {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

/// Integer endpoint: optional '-', digits, optional '^' exponent (2^32).
/// Returns the number of consumed characters, or 0 on failure.
size_t parse_int_endpoint(std::string_view s, int64_t& out) {
  size_t i = 0;
  bool negative = false;
  if (i < s.size() && s[i] == '-') {
    negative = true;
    ++i;
  }
  const size_t digits_start = i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == digits_start) return 0;
  int64_t base = 0;
  auto [p, ec] = std::from_chars(s.data() + digits_start, s.data() + i, base);
  if (ec != std::errc{}) return 0;
  if (i < s.size() && s[i] == '^') {
    ++i;
    const size_t exp_start = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i == exp_start) return 0;
    int64_t exponent = 0;
    auto [p2, ec2] = std::from_chars(s.data() + exp_start, s.data() + i, exponent);
    if (ec2 != std::errc{}) return 0;
    int64_t value = 1;
    for (int64_t k = 0; k < exponent; ++k) {
      if (__builtin_mul_overflow(value, base, &value)) return 0;
    }
    base = value;
  }
  out = negative ? -base : base;
  return i;
}

size_t parse_float_endpoint(std::string_view s, double& out) {
  size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  const size_t digits_start = i;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  if (i == digits_start) return 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  }
  auto [p, ec] = std::from_chars(s.data(), s.data() + i, out);
  if (ec != std::errc{} || p != s.data() + i) return 0;
  return i;
}

ParseResult<ColumnSpec> parse_column(std::string_view text, int col_number) {
  const auto diag = [col_number](DiagCode code, std::string message) {
    return ParseDiagnostic{code, std::move(message), 1, col_number};
  };
  const size_t open = text.find('[');
  if (open == std::string_view::npos || text.back() != ']') {
    return diag(DiagCode::Syntax, "expected '<kind>[...]' column spec");
  }
  const std::string_view kind = trim_view(text.substr(0, open));
  const std::string_view body = text.substr(open + 1, text.size() - open - 2);

  if (kind == "number string") {
    if (body.empty()) return diag(DiagCode::EmptyPattern, "empty digit pattern");
    for (char c : body) {
      if (c != 'x' && (c < '0' || c > '9')) {
        return diag(DiagCode::Syntax, "digit pattern may contain only digits and 'x'");
      }
    }
    return ColumnSpec{DigitPattern{std::string(body)}};
  }
  if (kind == "integer") {
    int64_t lo = 0;
    int64_t hi = 0;
    const size_t lo_len = parse_int_endpoint(body, lo);
    if (lo_len == 0 || lo_len >= body.size() || body[lo_len] != '-') {
      return diag(DiagCode::MalformedRange, "expected integer[<lo>-<hi>]");
    }
    const std::string_view rest = body.substr(lo_len + 1);
    if (parse_int_endpoint(rest, hi) != rest.size() || rest.empty()) {
      return diag(DiagCode::MalformedRange, "expected integer[<lo>-<hi>]");
    }
    if (lo > hi) return diag(DiagCode::MalformedRange, "malformed range: lo > hi");
    return ColumnSpec{IntRange{lo, hi}};
  }
  if (kind == "float") {
    double lo = 0;
    double hi = 0;
    const size_t lo_len = parse_float_endpoint(body, lo);
    if (lo_len == 0 || lo_len >= body.size() || body[lo_len] != '-') {
      return diag(DiagCode::MalformedRange, "expected float[<lo>-<hi>]");
    }
    const std::string_view rest = body.substr(lo_len + 1);
    if (parse_float_endpoint(rest, hi) != rest.size() || rest.empty()) {
      return diag(DiagCode::MalformedRange, "expected float[<lo>-<hi>]");
    }
    if (lo > hi) return diag(DiagCode::MalformedRange, "malformed range: lo > hi");
    return ColumnSpec{FloatRange{lo, hi}};
  }
  if (kind == "enum") {
    EnumChoices e;
    size_t start = 0;
    while (true) {
      const size_t bar = body.find('|', start);
      const std::string_view choice =
          body.substr(start, bar == std::string_view::npos ? bar : bar - start);
      if (choice.empty()) return diag(DiagCode::Syntax, "enum choices must be non-empty");
      e.choices.emplace_back(choice);
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
    return ColumnSpec{std::move(e)};
  }
  if (kind == "string") {
    if (!all_digits(body)) return diag(DiagCode::Syntax, "expected string[<maxlen>]");
    size_t max_len = 0;
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), max_len);
    if (ec != std::errc{}) return diag(DiagCode::Syntax, "string length out of range");
    return ColumnSpec{FreeString{max_len}};
  }
  return diag(DiagCode::UnknownColumnKind, "unknown column kind '" + std::string(kind) + "'");
}

bool field_valid(const ColumnSpec& column, std::string_view field) {
  return std::visit(
      [&](const auto& spec) -> bool {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, DigitPattern>) {
          if (field.size() != spec.pattern.size()) return false;
          for (size_t i = 0; i < field.size(); ++i) {
            const char want = spec.pattern[i];
            const char got = field[i];
            if (want == 'x') {
              if (got < '0' || got > '9') return false;
            } else if (got != want) {
              return false;
            }
          }
          return true;
        } else if constexpr (std::is_same_v<T, IntRange>) {
          if (field.empty()) return false;
          size_t i = field[0] == '-' ? 1 : 0;
          if (i == field.size()) return false;
          for (size_t j = i; j < field.size(); ++j) {
            if (field[j] < '0' || field[j] > '9') return false;
          }
          int64_t v = 0;
          auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
          if (ec != std::errc{} || p != field.data() + field.size()) return false;
          return v >= spec.lo && v <= spec.hi;
        } else if constexpr (std::is_same_v<T, FloatRange>) {
          double v = 0;
          auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
          if (ec != std::errc{} || p != field.data() + field.size()) return false;
          return v >= spec.lo && v <= spec.hi;
        } else if constexpr (std::is_same_v<T, EnumChoices>) {
          for (const std::string& c : spec.choices) {
            if (field == c) return true;
          }
          return false;
        } else {
          return field.size() <= spec.max_len;
        }
      },
      column);
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t at = line.find(delim, start);
    if (at == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, at - start));
    start = at + 1;
  }
}

std::string render_float_field(double d) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, end);
}

}  // namespace

const char* to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::InRangeReplace: return "in-range-replace";
    case MutationKind::OutOfRange: return "out-of-range";
    case MutationKind::TypeChange: return "type-change";
    case MutationKind::DelimiterChange: return "delimiter-change";
    case MutationKind::ColumnCount: return "column-count";
    case MutationKind::EmptyField: return "empty-field";
    case MutationKind::ByteFlip: return "byte-flip";
    case MutationKind::ByteReplace: return "byte-replace";
  }
  return "?";
}

ParseResult<Schema> parse_schema(std::string_view text) {
  Schema schema;
  const std::string_view line = trim_view(text);
  if (line.empty()) {
    return ParseDiagnostic{DiagCode::Syntax, "schema must declare at least one column", 1, 1};
  }
  // Columns are comma-separated; brackets never nest, so a plain split on
  // commas outside brackets suffices.
  size_t start = 0;
  int depth = 0;
  int col_number = 1;
  for (size_t i = 0; i <= line.size(); ++i) {
    const bool at_end = i == line.size();
    if (!at_end && line[i] == '[') ++depth;
    if (!at_end && line[i] == ']') --depth;
    if (at_end || (line[i] == ',' && depth == 0)) {
      const std::string_view token = trim_view(line.substr(start, i - start));
      if (token.empty()) {
        return ParseDiagnostic{DiagCode::Syntax, "empty column spec", 1, col_number};
      }
      auto column = parse_column(token, col_number);
      if (!column.ok()) return column.diagnostic();
      schema.columns.push_back(column.take_value());
      start = i + 1;
      ++col_number;
    }
  }
  return schema;
}

bool validate_row(const Schema& schema, std::string_view line) {
  const std::vector<std::string_view> fields = split_fields(line, schema.delimiter);
  if (fields.size() != schema.columns.size()) return false;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (!field_valid(schema.columns[i], fields[i])) return false;
  }
  return true;
}

std::string generate_field(const ColumnSpec& column, Rng& rng) {
  return std::visit(
      [&](const auto& spec) -> std::string {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, DigitPattern>) {
          std::string out = spec.pattern;
          for (char& c : out) {
            if (c == 'x') c = static_cast<char>('0' + rng.below(10));
          }
          return out;
        } else if constexpr (std::is_same_v<T, IntRange>) {
          return std::to_string(rng.uniform_int(spec.lo, spec.hi));
        } else if constexpr (std::is_same_v<T, FloatRange>) {
          const double u = rng.uniform_real();
          double v = spec.lo + u * (spec.hi - spec.lo);
          if (v < spec.lo) v = spec.lo;
          if (v > spec.hi) v = spec.hi;
          return render_float_field(v);
        } else if constexpr (std::is_same_v<T, EnumChoices>) {
          return spec.choices[rng.below(spec.choices.size())];
        } else {
          static constexpr std::string_view alphabet =
              "abcdefghijklmnopqrstuvwxyz0123456789_";
          const size_t len = rng.below(spec.max_len + 1);
          std::string out;
          out.reserve(len);
          for (size_t i = 0; i < len; ++i) out += alphabet[rng.below(alphabet.size())];
          return out;
        }
      },
      column);
}

TestInput generate_valid(const Schema& schema, Rng& rng, size_t n_rows) {
  TestInput input;
  input.provenance.kind = Provenance::Kind::Generated;
  input.rows.reserve(n_rows);
  for (size_t r = 0; r < n_rows; ++r) {
    std::string line;
    for (size_t c = 0; c < schema.columns.size(); ++c) {
      if (c) line += schema.delimiter;
      line += generate_field(schema.columns[c], rng);
    }
    input.rows.push_back(std::move(line));
  }
  return input;
}

}  // namespace flowfuzz
