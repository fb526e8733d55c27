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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flowfuzz {

class Value;

/// Runtime fault taxonomy. Faults are returned as values, never thrown across
/// module boundaries: the fuzz engine has to observe them, classify them, and
/// keep going.
enum class FaultKind {
  ParseFailure,
  DivByZero,
  IndexOutOfBounds,
  TypeMismatch,
  Overflow,
  EmptyReduce,
};

const char* to_string(FaultKind kind);

struct RuntimeFault {
  FaultKind kind = FaultKind::TypeMismatch;
  /// UDF the fault occurred in, if any; faults raised by an operator itself
  /// (bad record shape, empty reduce) carry no udf_id.
  std::optional<int> udf_id;
  /// AST node id within the UDF, or the operator node id for operator faults.
  int node_id = -1;
  /// Informational only; (kind, udf_id, node_id) identifies the crash.
  std::string message;

  RuntimeFault at(std::optional<int> udf, int node) const {
    RuntimeFault f = *this;
    f.udf_id = udf;
    f.node_id = node;
    return f;
  }

  std::string render() const;
};

inline RuntimeFault make_fault(FaultKind kind, std::string message) {
  return RuntimeFault{kind, std::nullopt, -1, std::move(message)};
}

/// Either a computed value or the fault that stopped the computation.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(RuntimeFault fault) : v_(std::move(fault)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  T& value() { return std::get<T>(v_); }
  const T& value() const { return std::get<T>(v_); }
  T take_value() { return std::move(std::get<T>(v_)); }
  const RuntimeFault& fault() const { return std::get<RuntimeFault>(v_); }

 private:
  std::variant<T, RuntimeFault> v_;
};

struct TupleData {
  std::vector<Value> items;
  bool operator==(const TupleData&) const = default;
};

struct SeqData {
  std::vector<Value> items;
  bool operator==(const SeqData&) const = default;
};

/// Dynamically typed cell value flowing through the pipeline.
///
/// Tuples have fixed arity >= 2 (pair records, parsed rows); Seqs hold any
/// number of elements (split results, flatMap outputs). Int arithmetic on
/// these values is checked: overflow is a fault, never a silent wrap.
class Value {
 public:
  enum class Tag { Null, Bool, Int, Float, Str, Tuple, Seq };

  Value() : data_(std::monostate{}) {}

  static Value null() { return Value(); }
  static Value boolean(bool b) { return Value(Data(b)); }
  static Value integer(int64_t i) { return Value(Data(i)); }
  static Value real(double d) { return Value(Data(d)); }
  static Value str(std::string s) { return Value(Data(std::move(s))); }
  static Value tuple(std::vector<Value> items) {
    if (items.size() < 2) throw std::logic_error("tuple arity must be >= 2");
    return Value(Data(TupleData{std::move(items)}));
  }
  static Value seq(std::vector<Value> items) { return Value(Data(SeqData{std::move(items)})); }

  Tag tag() const { return static_cast<Tag>(data_.index()); }
  bool is_null() const { return tag() == Tag::Null; }
  bool is_bool() const { return tag() == Tag::Bool; }
  bool is_int() const { return tag() == Tag::Int; }
  bool is_float() const { return tag() == Tag::Float; }
  bool is_str() const { return tag() == Tag::Str; }
  bool is_tuple() const { return tag() == Tag::Tuple; }
  bool is_seq() const { return tag() == Tag::Seq; }

  bool as_bool() const { return std::get<bool>(data_); }
  int64_t as_int() const { return std::get<int64_t>(data_); }
  double as_float() const { return std::get<double>(data_); }
  const std::string& as_str() const { return std::get<std::string>(data_); }

  /// Elements of a Tuple or Seq.
  const std::vector<Value>& items() const {
    if (is_tuple()) return std::get<TupleData>(data_).items;
    return std::get<SeqData>(data_).items;
  }

 private:
  using Data =
      std::variant<std::monostate, bool, int64_t, double, std::string, TupleData, SeqData>;
  explicit Value(Data d) : data_(std::move(d)) {}

  Data data_;
};

const char* to_string(Value::Tag tag);

// Terse constructors; tests and the interpreter build a lot of values.
inline Value vnull() { return Value::null(); }
inline Value vbool(bool b) { return Value::boolean(b); }
inline Value vint(int64_t i) { return Value::integer(i); }
inline Value vfloat(double d) { return Value::real(d); }
inline Value vstr(std::string s) { return Value::str(std::move(s)); }
inline Value vtuple(std::vector<Value> items) { return Value::tuple(std::move(items)); }
inline Value vseq(std::vector<Value> items) { return Value::seq(std::move(items)); }

/// One dataset row. Raw source rows are Str; post-map rows are typically
/// Tuple. A record is exactly one value, no hidden metadata.
using Record = Value;

/// Ordered row sequence. Ordering is deterministic: input order, or
/// first-appearance key order after keyed operators.
struct Dataset {
  std::vector<Record> rows;
};

/// Tag-respecting equality. Tuples and Seqs compare element-wise
/// (left-to-right, first difference wins); comparing different tags is a
/// TypeMismatch fault, except Null == Null which is true. Floats compare by
/// bit pattern and NaN never equals anything.
Result<bool> value_eq(const Value& a, const Value& b);

/// Deterministic, round-trippable rendering. Floats use the shortest decimal
/// that parses back to the same bits (always carrying a '.' or exponent so
/// they stay distinguishable from Ints).
std::string render_value(const Value& v);

/// Inverse of render_value. Returns nullopt on text outside the grammar.
std::optional<Value> parse_value(std::string_view text);

// Checked 64-bit arithmetic; overflow and zero division are faults.
Result<int64_t> checked_add(int64_t a, int64_t b);
Result<int64_t> checked_sub(int64_t a, int64_t b);
Result<int64_t> checked_mul(int64_t a, int64_t b);
Result<int64_t> checked_div(int64_t a, int64_t b);
Result<int64_t> checked_mod(int64_t a, int64_t b);
Result<int64_t> checked_neg(int64_t a);

/// Escape a string for the value grammar ('"', '\\', newline, tab, CR).
std::string escape_str(std::string_view s);

}  // namespace flowfuzz
