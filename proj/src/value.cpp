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

#include "flowfuzz/value.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

namespace flowfuzz {

const char* to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::ParseFailure: return "ParseFailure";
    case FaultKind::DivByZero: return "DivByZero";
    case FaultKind::IndexOutOfBounds: return "IndexOutOfBounds";
    case FaultKind::TypeMismatch: return "TypeMismatch";
    case FaultKind::Overflow: return "Overflow";
    case FaultKind::EmptyReduce: return "EmptyReduce";
  }
  return "?";
}

const char* to_string(Value::Tag tag) {
  switch (tag) {
    case Value::Tag::Null: return "Null";
    case Value::Tag::Bool: return "Bool";
    case Value::Tag::Int: return "Int";
    case Value::Tag::Float: return "Float";
    case Value::Tag::Str: return "Str";
    case Value::Tag::Tuple: return "Tuple";
    case Value::Tag::Seq: return "Seq";
  }
  return "?";
}

std::string RuntimeFault::render() const {
  std::string out = to_string(kind);
  out += " udf=";
  out += udf_id ? std::to_string(*udf_id) : "none";
  out += " node=" + std::to_string(node_id);
  if (!message.empty()) {
    out += " (" + message + ")";
  }
  return out;
}

Result<bool> value_eq(const Value& a, const Value& b) {
  if (a.tag() != b.tag()) {
    return make_fault(FaultKind::TypeMismatch,
                      std::string("cannot compare ") + to_string(a.tag()) + " with " +
                          to_string(b.tag()));
  }
  switch (a.tag()) {
    case Value::Tag::Null:
      return true;
    case Value::Tag::Bool:
      return a.as_bool() == b.as_bool();
    case Value::Tag::Int:
      return a.as_int() == b.as_int();
    case Value::Tag::Float: {
      const double x = a.as_float();
      const double y = b.as_float();
      if (std::isnan(x) || std::isnan(y)) return false;
      return std::bit_cast<uint64_t>(x) == std::bit_cast<uint64_t>(y);
    }
    case Value::Tag::Str:
      return a.as_str() == b.as_str();
    case Value::Tag::Tuple:
    case Value::Tag::Seq: {
      const auto& xs = a.items();
      const auto& ys = b.items();
      if (xs.size() != ys.size()) return false;
      for (size_t i = 0; i < xs.size(); ++i) {
        Result<bool> r = value_eq(xs[i], ys[i]);
        if (!r.ok()) return r;
        if (!r.value()) return false;
      }
      return true;
    }
  }
  return false;
}

std::string escape_str(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

std::string render_float(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d < 0 ? "-inf" : "inf";
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  std::string s(buf, end);
  // Keep floats lexically distinct from ints: "42" becomes "42.0".
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void render_into(const Value& v, std::string& out) {
  switch (v.tag()) {
    case Value::Tag::Null:
      out += "null";
      return;
    case Value::Tag::Bool:
      out += v.as_bool() ? "true" : "false";
      return;
    case Value::Tag::Int:
      out += std::to_string(v.as_int());
      return;
    case Value::Tag::Float:
      out += render_float(v.as_float());
      return;
    case Value::Tag::Str:
      out += '"';
      out += escape_str(v.as_str());
      out += '"';
      return;
    case Value::Tag::Tuple:
    case Value::Tag::Seq: {
      out += v.is_tuple() ? '(' : '[';
      bool first = true;
      for (const Value& item : v.items()) {
        if (!first) out += ',';
        first = false;
        render_into(item, out);
      }
      out += v.is_tuple() ? ')' : ']';
      return;
    }
  }
}

/// Recursive-descent reader for the value grammar.
class ValueReader {
 public:
  explicit ValueReader(std::string_view text) : text_(text) {}

  std::optional<Value> read_all() {
    auto v = read_value();
    if (!v) return std::nullopt;
    skip_ws();
    if (pos_ != text_.size()) return std::nullopt;
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool eat_word(std::string_view w) {
    if (text_.substr(pos_, w.size()) == w) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  std::optional<Value> read_value() {
    skip_ws();
    if (pos_ >= text_.size()) return std::nullopt;
    const char c = text_[pos_];
    if (eat_word("null")) return vnull();
    if (eat_word("true")) return vbool(true);
    if (eat_word("false")) return vbool(false);
    if (eat_word("nan")) return vfloat(std::numeric_limits<double>::quiet_NaN());
    if (eat_word("inf")) return vfloat(std::numeric_limits<double>::infinity());
    if (eat_word("-inf")) return vfloat(-std::numeric_limits<double>::infinity());
    if (c == '"') return read_string();
    if (c == '(') return read_list(')');
    if (c == '[') return read_list(']');
    if (c == '-' || (c >= '0' && c <= '9')) return read_number();
    return std::nullopt;
  }

  std::optional<Value> read_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '"') return vstr(std::move(out));
      if (c == '\\') {
        if (pos_ >= text_.size()) return std::nullopt;
        char e = text_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          default: return std::nullopt;
        }
      } else {
        out += c;
      }
    }
    return std::nullopt;  // unterminated
  }

  std::optional<Value> read_list(char close) {
    ++pos_;  // opening bracket
    std::vector<Value> items;
    skip_ws();
    if (close == ']' && eat(']')) return vseq({});
    while (true) {
      auto v = read_value();
      if (!v) return std::nullopt;
      items.push_back(std::move(*v));
      skip_ws();
      if (eat(',')) continue;
      if (eat(close)) break;
      return std::nullopt;
    }
    if (close == ')') {
      if (items.size() < 2) return std::nullopt;  // "(x)" is not a value form
      return vtuple(std::move(items));
    }
    return vseq(std::move(items));
  }

  std::optional<Value> read_number() {
    const size_t start = pos_;
    if (eat('-')) {}
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (pos_ == start || (text_[start] == '-' && pos_ == start + 1)) return std::nullopt;
    bool is_float = false;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      is_float = true;
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      is_float = true;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    }
    const std::string_view token = text_.substr(start, pos_ - start);
    if (is_float) {
      double d = 0;
      auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), d);
      if (ec != std::errc{} || p != token.data() + token.size()) return std::nullopt;
      return vfloat(d);
    }
    int64_t i = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), i);
    if (ec != std::errc{} || p != token.data() + token.size()) return std::nullopt;
    return vint(i);
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

std::string render_value(const Value& v) {
  std::string out;
  render_into(v, out);
  return out;
}

std::optional<Value> parse_value(std::string_view text) {
  return ValueReader(text).read_all();
}

Result<int64_t> checked_add(int64_t a, int64_t b) {
  int64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    return make_fault(FaultKind::Overflow, "integer addition overflow");
  }
  return out;
}

Result<int64_t> checked_sub(int64_t a, int64_t b) {
  int64_t out;
  if (__builtin_sub_overflow(a, b, &out)) {
    return make_fault(FaultKind::Overflow, "integer subtraction overflow");
  }
  return out;
}

Result<int64_t> checked_mul(int64_t a, int64_t b) {
  int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) {
    return make_fault(FaultKind::Overflow, "integer multiplication overflow");
  }
  return out;
}

Result<int64_t> checked_div(int64_t a, int64_t b) {
  if (b == 0) return make_fault(FaultKind::DivByZero, "division by zero");
  if (a == std::numeric_limits<int64_t>::min() && b == -1) {
    return make_fault(FaultKind::Overflow, "integer division overflow");
  }
  return a / b;
}

Result<int64_t> checked_mod(int64_t a, int64_t b) {
  if (b == 0) return make_fault(FaultKind::DivByZero, "modulo by zero");
  if (a == std::numeric_limits<int64_t>::min() && b == -1) {
    return make_fault(FaultKind::Overflow, "integer modulo overflow");
  }
  return a % b;
}

Result<int64_t> checked_neg(int64_t a) {
  if (a == std::numeric_limits<int64_t>::min()) {
    return make_fault(FaultKind::Overflow, "integer negation overflow");
  }
  return -a;
}

}  // namespace flowfuzz
