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

#include <string>

#include <doctest.h>

#include "flowfuzz/schema.hpp"

namespace flowfuzz {
namespace {

constexpr const char* kIncomeSchema = "number string[900xx],integer[0-120],integer[0-2^32]";

Schema schema_of(std::string_view text) {
  auto r = parse_schema(text);
  if (!r.ok()) FAIL(r.diagnostic().render());
  return r.take_value();
}

TEST_CASE("income schema parses to its three documented columns") {
  const Schema schema = schema_of(kIncomeSchema);
  CHECK(schema.delimiter == ',');
  REQUIRE(schema.columns.size() == 3);
  CHECK(std::get<DigitPattern>(schema.columns[0]) == DigitPattern{"900xx"});
  CHECK(std::get<IntRange>(schema.columns[1]) == IntRange{0, 120});
  CHECK(std::get<IntRange>(schema.columns[2]) == IntRange{0, 4294967296LL});
}

TEST_CASE("schema parse accepts degenerate and rejects malformed ranges") {
  const Schema degenerate = schema_of("integer[5-5]");
  CHECK(std::get<IntRange>(degenerate.columns[0]) == IntRange{5, 5});

  auto inverted = parse_schema("integer[9-1]");
  REQUIRE_FALSE(inverted.ok());
  CHECK(inverted.diagnostic().code == DiagCode::MalformedRange);

  auto unknown = parse_schema("decimal[0-1]");
  REQUIRE_FALSE(unknown.ok());
  CHECK(unknown.diagnostic().code == DiagCode::UnknownColumnKind);

  auto empty_pattern = parse_schema("number string[]");
  REQUIRE_FALSE(empty_pattern.ok());
  CHECK(empty_pattern.diagnostic().code == DiagCode::EmptyPattern);

  auto empty = parse_schema("   ");
  CHECK_FALSE(empty.ok());
}

TEST_CASE("schema parse covers the other column kinds") {
  const Schema schema = schema_of("enum[red|green|blue],float[0-1],string[8],integer[-5-5]");
  REQUIRE(schema.columns.size() == 4);
  CHECK(std::get<EnumChoices>(schema.columns[0]).choices ==
        std::vector<std::string>{"red", "green", "blue"});
  CHECK(std::get<FloatRange>(schema.columns[1]) == FloatRange{0.0, 1.0});
  CHECK(std::get<FreeString>(schema.columns[2]) == FreeString{8});
  CHECK(std::get<IntRange>(schema.columns[3]) == IntRange{-5, 5});
}

TEST_CASE("validate_row checks field count and every column") {
  const Schema schema = schema_of(kIncomeSchema);
  CHECK(validate_row(schema, "90095,33,58000"));
  CHECK_FALSE(validate_row(schema, "90024,999,5"));  // age out of range
  CHECK_FALSE(validate_row(schema, "90024,20"));     // missing column
  CHECK_FALSE(validate_row(schema, "90024,20,1,2"));
  CHECK_FALSE(validate_row(schema, "9002x,20,5"));   // pattern wants a digit
  CHECK_FALSE(validate_row(schema, "91024,20,5"));   // fixed prefix mismatch
  CHECK_FALSE(validate_row(schema, "900240,20,5"));  // wrong length
  CHECK_FALSE(validate_row(schema, "90024,abc,5"));
  CHECK_FALSE(validate_row(schema, "90024,20,"));
  CHECK_FALSE(validate_row(schema, "90024,20,4294967297"));  // above 2^32
  CHECK(validate_row(schema, "90024,0,4294967296"));
}

TEST_CASE("validate_row on enum, float, and string columns") {
  const Schema schema = schema_of("enum[a|bb],float[0-1.5],string[3]");
  CHECK(validate_row(schema, "a,0.25,xyz"));
  CHECK(validate_row(schema, "bb,1.5,"));
  CHECK_FALSE(validate_row(schema, "c,0.25,xyz"));
  CHECK_FALSE(validate_row(schema, "a,2.5,xyz"));
  CHECK_FALSE(validate_row(schema, "a,0.25,wxyz"));
  CHECK_FALSE(validate_row(schema, "a,nan,xyz"));
}

TEST_CASE("generated rows always validate and honor the pattern") {
  const Schema schema = schema_of(kIncomeSchema);
  Rng rng(7);
  const TestInput input = generate_valid(schema, rng, 2000);
  REQUIRE(input.rows.size() == 2000);
  CHECK(input.provenance.kind == Provenance::Kind::Generated);
  for (const std::string& row : input.rows) {
    CHECK_MESSAGE(validate_row(schema, row), row);
    CHECK(row.substr(0, 3) == "900");
  }
}

TEST_CASE("single-choice enum generates that choice") {
  const Schema schema = schema_of("enum[a]");
  Rng rng(9);
  const TestInput input = generate_valid(schema, rng, 50);
  for (const std::string& row : input.rows) CHECK(row == "a");
}

TEST_CASE("generated integer column is uniform: sample mean near midpoint") {
  const Schema schema = schema_of(kIncomeSchema);
  Rng rng(1);
  const TestInput input = generate_valid(schema, rng, 10000);
  double sum = 0;
  for (const std::string& row : input.rows) {
    const size_t first = row.find(',');
    const size_t second = row.find(',', first + 1);
    sum += std::stod(row.substr(first + 1, second - first - 1));
  }
  const double mean = sum / 10000.0;
  // Uniform [0,120] has mean 60; the tolerance is generous against seeds.
  CHECK(mean > 55.0);
  CHECK(mean < 65.0);
}

TEST_CASE("float and string columns generate valid fields") {
  const Schema schema = schema_of("float[-2.5-2.5],string[6]");
  Rng rng(11);
  const TestInput input = generate_valid(schema, rng, 500);
  for (const std::string& row : input.rows) {
    CHECK_MESSAGE(validate_row(schema, row), row);
  }
}

}  // namespace
}  // namespace flowfuzz
