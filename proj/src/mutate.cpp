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

#include <charconv>
#include <limits>
#include <string>

#include "flowfuzz/schema.hpp"

namespace flowfuzz {

namespace {

std::vector<std::string> split_owned(const std::string& line, char delim) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t at = line.find(delim, start);
    if (at == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, at - start));
    start = at + 1;
  }
}

std::string join(const std::vector<std::string>& fields, char delim) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += delim;
    out += fields[i];
  }
  return out;
}

std::string random_letters(Rng& rng, size_t len) {
  std::string out;
  out.reserve(len);
  for (size_t i = 0; i < len; ++i) out += static_cast<char>('a' + rng.below(26));
  return out;
}

std::string render_float_text(double d) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, end);
}

bool is_numeric_column(const ColumnSpec& column) {
  return std::holds_alternative<IntRange>(column) ||
         std::holds_alternative<FloatRange>(column) ||
         std::holds_alternative<DigitPattern>(column);
}

/// A value just outside the declared range: hi+delta, lo-delta, a broken
/// digit pattern, a token outside the enum, or an over-long string.
std::string out_of_range_field(const ColumnSpec& column, Rng& rng) {
  const int64_t delta = 1 + static_cast<int64_t>(rng.below(10));
  return std::visit(
      [&](const auto& spec) -> std::string {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, IntRange>) {
          const bool above = rng.below(2) == 0;
          int64_t v = 0;
          if (above && !__builtin_add_overflow(spec.hi, delta, &v)) {
            return std::to_string(v);
          }
          if (!__builtin_sub_overflow(spec.lo, delta, &v)) {
            return std::to_string(v);
          }
          return std::string(30, '9');  // out of int64 entirely
        } else if constexpr (std::is_same_v<T, FloatRange>) {
          const bool above = rng.below(2) == 0;
          const double v = above ? spec.hi + static_cast<double>(delta)
                                 : spec.lo - static_cast<double>(delta);
          return render_float_text(v);
        } else if constexpr (std::is_same_v<T, DigitPattern>) {
          std::string out = spec.pattern;
          for (char& c : out) {
            if (c == 'x') c = static_cast<char>('0' + rng.below(10));
          }
          // Corrupt a fixed position when one exists, otherwise break the
          // length: either way validate_row must reject.
          const size_t fixed = spec.pattern.find_first_not_of('x');
          if (fixed != std::string::npos && rng.below(2) == 0) {
            const char was = spec.pattern[fixed];
            out[fixed] = static_cast<char>('0' + (was - '0' + 1) % 10);
          } else if (rng.below(2) == 0) {
            out += static_cast<char>('0' + rng.below(10));
          } else {
            out.erase(out.size() - 1);
            if (out.empty()) out = "00";
          }
          return out;
        } else if constexpr (std::is_same_v<T, EnumChoices>) {
          std::string out = "zz";
          bool clash = true;
          while (clash) {
            clash = false;
            for (const std::string& c : spec.choices) clash |= c == out;
            if (clash) out += 'z';
          }
          return out;
        } else {
          return std::string(spec.max_len + 1 + rng.below(5), 'a');
        }
      },
      column);
}

std::string type_change_field(const ColumnSpec& column, Rng& rng) {
  if (is_numeric_column(column)) {
    const bool float_form =
        !std::holds_alternative<FloatRange>(column) && rng.below(2) == 0;
    if (float_form) {
      // Float-formatted value in an integer-shaped field.
      return std::to_string(rng.below(1000)) + "." + std::to_string(rng.below(10));
    }
    return random_letters(rng, 1 + rng.below(8));
  }
  // Non-numeric column: swap in a number-looking token.
  std::string out;
  const size_t len = 1 + rng.below(8);
  for (size_t i = 0; i < len; ++i) out += static_cast<char>('0' + rng.below(10));
  return out;
}

}  // namespace

TestInput mutate(const Schema& schema, const TestInput& input, Rng& rng, int k, int parent_id) {
  TestInput out;
  out.rows = input.rows;
  out.provenance.kind = Provenance::Kind::Mutated;
  out.provenance.parent_id = parent_id;

  static const char kAltDelims[] = {';', '\t', '|', ':', ' '};

  for (int step = 0; step < k; ++step) {
    const auto kind = static_cast<MutationKind>(rng.below(6));
    const int row = static_cast<int>(rng.below(out.rows.size()));
    std::string& line = out.rows[static_cast<size_t>(row)];
    std::vector<std::string> fields = split_owned(line, schema.delimiter);
    MutationDescriptor desc;
    desc.kind = kind;
    desc.row = row;

    // Columns past the schema keep their position but have no spec; value
    // mutations target the overlap of actual fields and declared columns.
    const size_t spec_cols = std::min(fields.size(), schema.columns.size());

    switch (kind) {
      case MutationKind::InRangeReplace: {
        const int col = static_cast<int>(rng.below(spec_cols));
        fields[static_cast<size_t>(col)] =
            generate_field(schema.columns[static_cast<size_t>(col)], rng);
        desc.col = col;
        line = join(fields, schema.delimiter);
        break;
      }
      case MutationKind::OutOfRange: {
        const int col = static_cast<int>(rng.below(spec_cols));
        fields[static_cast<size_t>(col)] =
            out_of_range_field(schema.columns[static_cast<size_t>(col)], rng);
        desc.col = col;
        line = join(fields, schema.delimiter);
        break;
      }
      case MutationKind::TypeChange: {
        const int col = static_cast<int>(rng.below(spec_cols));
        fields[static_cast<size_t>(col)] =
            type_change_field(schema.columns[static_cast<size_t>(col)], rng);
        desc.col = col;
        line = join(fields, schema.delimiter);
        break;
      }
      case MutationKind::DelimiterChange: {
        char alt = kAltDelims[rng.below(sizeof(kAltDelims))];
        while (alt == schema.delimiter) alt = kAltDelims[rng.below(sizeof(kAltDelims))];
        for (char& c : line) {
          if (c == schema.delimiter) c = alt;
        }
        desc.note = std::string(1, alt);
        break;
      }
      case MutationKind::ColumnCount: {
        const int col = static_cast<int>(rng.below(fields.size()));
        const bool drop = fields.size() >= 2 && rng.below(2) == 0;
        if (drop) {
          fields.erase(fields.begin() + col);
          desc.note = "drop";
        } else {
          std::string dup = fields[static_cast<size_t>(col)];
          fields.insert(fields.begin() + col, std::move(dup));
          desc.note = "dup";
        }
        desc.col = col;
        line = join(fields, schema.delimiter);
        break;
      }
      case MutationKind::EmptyField: {
        const int col = static_cast<int>(rng.below(fields.size()));
        fields[static_cast<size_t>(col)].clear();
        desc.col = col;
        line = join(fields, schema.delimiter);
        break;
      }
      default:
        break;  // byte kinds are not schema-aware choices
    }
    out.provenance.ops.push_back(std::move(desc));
  }
  return out;
}

TestInput random_byte_mutate(const TestInput& input, Rng& rng, int k, ByteMutateMode mode,
                             int parent_id) {
  std::string blob;
  for (size_t i = 0; i < input.rows.size(); ++i) {
    if (i) blob += '\n';
    blob += input.rows[i];
  }

  TestInput out;
  out.provenance.kind = Provenance::Kind::Mutated;
  out.provenance.parent_id = parent_id;

  for (int step = 0; step < k && !blob.empty(); ++step) {
    const size_t pos = rng.below(blob.size());
    const bool flip = mode == ByteMutateMode::FlipOnly ||
                      (mode == ByteMutateMode::Mixed && rng.below(2) == 0);
    MutationDescriptor desc;
    desc.row = static_cast<int>(pos);  // byte position, not a row index
    if (flip) {
      blob[pos] = static_cast<char>(static_cast<unsigned char>(blob[pos]) ^
                                    (1u << rng.below(8)));
      desc.kind = MutationKind::ByteFlip;
    } else {
      blob[pos] = static_cast<char>(rng.below(256));
      desc.kind = MutationKind::ByteReplace;
    }
    out.provenance.ops.push_back(std::move(desc));
  }

  // Split back on newlines; structure damage is the point.
  size_t start = 0;
  while (true) {
    const size_t at = blob.find('\n', start);
    if (at == std::string::npos) {
      out.rows.push_back(blob.substr(start));
      break;
    }
    out.rows.push_back(blob.substr(start, at - start));
    start = at + 1;
  }
  return out;
}

}  // namespace flowfuzz
