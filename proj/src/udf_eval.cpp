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

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include "flowfuzz/udf.hpp"

namespace flowfuzz {

namespace {

class Evaluator {
 public:
  Evaluator(const UdfAst& udf, std::span<const Value> args, EventSink& sink)
      : udf_(udf), sink_(sink) {
    env_.assign(args.begin(), args.end());
  }

  Result<Value> run() { return eval(*udf_.body); }

 private:
  RuntimeFault fault(const Expr& e, FaultKind kind, std::string message) const {
    return RuntimeFault{kind, udf_.udf_id, e.node_id, std::move(message)};
  }

  RuntimeFault located(RuntimeFault f, const Expr& e) const {
    return f.at(udf_.udf_id, e.node_id);
  }

  Result<Value> eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Literal:
        return e.literal;
      case ExprKind::Var:
        return env_[static_cast<size_t>(e.slot)];
      case ExprKind::Let: {
        Result<Value> bound = eval(*e.kids[0]);
        if (!bound.ok()) return bound;
        env_.push_back(bound.take_value());
        Result<Value> body = eval(*e.kids[1]);
        env_.pop_back();
        return body;
      }
      case ExprKind::TupleCtor: {
        std::vector<Value> items;
        items.reserve(e.kids.size());
        for (const auto& kid : e.kids) {
          Result<Value> v = eval(*kid);
          if (!v.ok()) return v;
          items.push_back(v.take_value());
        }
        return vtuple(std::move(items));
      }
      case ExprKind::Index:
        return eval_index(e);
      case ExprKind::Unary:
        return eval_unary(e);
      case ExprKind::Binary:
        return eval_binary(e);
      case ExprKind::If:
        return eval_if(e);
      case ExprKind::Call:
        return eval_call(e);
    }
    throw std::logic_error("unreachable expr kind");
  }

  Result<Value> eval_if(const Expr& e) {
    Result<Value> cond = eval(*e.kids[0]);
    if (!cond.ok()) return cond;
    if (!cond.value().is_bool()) {
      return fault(e, FaultKind::TypeMismatch, "if condition must be Bool");
    }
    const bool arm = cond.value().as_bool();
    sink_.emit(BranchEvent{udf_.udf_id, e.node_id, arm});
    return eval(arm ? *e.kids[1] : *e.kids[2]);
  }

  Result<Value> eval_index(const Expr& e) {
    Result<Value> base = eval(*e.kids[0]);
    if (!base.ok()) return base;
    Result<Value> index = eval(*e.kids[1]);
    if (!index.ok()) return index;
    if (!index.value().is_int()) {
      return fault(e, FaultKind::TypeMismatch, "index must be Int");
    }
    const Value& target = base.value();
    if (!target.is_tuple() && !target.is_seq()) {
      return fault(e, FaultKind::TypeMismatch,
                   std::string("cannot index ") + to_string(target.tag()));
    }
    const int64_t i = index.value().as_int();
    const auto& items = target.items();
    if (i < 0 || static_cast<size_t>(i) >= items.size()) {
      return fault(e, FaultKind::IndexOutOfBounds,
                   "index " + std::to_string(i) + " out of bounds for length " +
                       std::to_string(items.size()));
    }
    return items[static_cast<size_t>(i)];
  }

  Result<Value> eval_unary(const Expr& e) {
    Result<Value> operand = eval(*e.kids[0]);
    if (!operand.ok()) return operand;
    const Value& v = operand.value();
    if (e.un_op == UnOp::Not) {
      if (!v.is_bool()) return fault(e, FaultKind::TypeMismatch, "'!' needs a Bool operand");
      return vbool(!v.as_bool());
    }
    if (v.is_int()) {
      Result<int64_t> r = checked_neg(v.as_int());
      if (!r.ok()) return located(r.fault(), e);
      return vint(r.value());
    }
    if (v.is_float()) return vfloat(-v.as_float());
    return fault(e, FaultKind::TypeMismatch, "'-' needs a numeric operand");
  }

  Result<Value> eval_binary(const Expr& e) {
    // Short-circuit logic first; operands there are evaluated lazily and the
    // skipped side contributes no events.
    if (e.bin_op == BinOp::And || e.bin_op == BinOp::Or) {
      Result<Value> lhs = eval(*e.kids[0]);
      if (!lhs.ok()) return lhs;
      if (!lhs.value().is_bool()) {
        return fault(e, FaultKind::TypeMismatch, "logical operand must be Bool");
      }
      const bool l = lhs.value().as_bool();
      if (e.bin_op == BinOp::And && !l) return vbool(false);
      if (e.bin_op == BinOp::Or && l) return vbool(true);
      Result<Value> rhs = eval(*e.kids[1]);
      if (!rhs.ok()) return rhs;
      if (!rhs.value().is_bool()) {
        return fault(e, FaultKind::TypeMismatch, "logical operand must be Bool");
      }
      return vbool(rhs.value().as_bool());
    }

    Result<Value> lhs = eval(*e.kids[0]);
    if (!lhs.ok()) return lhs;
    Result<Value> rhs = eval(*e.kids[1]);
    if (!rhs.ok()) return rhs;
    const Value& a = lhs.value();
    const Value& b = rhs.value();

    switch (e.bin_op) {
      case BinOp::Eq:
      case BinOp::Ne: {
        Result<bool> r = value_eq(a, b);
        if (!r.ok()) return located(r.fault(), e);
        return vbool(e.bin_op == BinOp::Eq ? r.value() : !r.value());
      }
      case BinOp::Lt:
      case BinOp::Le:
      case BinOp::Gt:
      case BinOp::Ge:
        return eval_ordering(e, a, b);
      default:
        return eval_arith(e, a, b);
    }
  }

  Result<Value> eval_ordering(const Expr& e, const Value& a, const Value& b) {
    int cmp = 0;
    if (a.is_int() && b.is_int()) {
      cmp = a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
    } else if (a.is_float() && b.is_float()) {
      // NaN ordering comparisons are all false, matching IEEE.
      const double x = a.as_float();
      const double y = b.as_float();
      if (std::isnan(x) || std::isnan(y)) return vbool(false);
      cmp = x < y ? -1 : (x > y ? 1 : 0);
    } else if (a.is_str() && b.is_str()) {
      // Lexicographic byte order; deterministic and locale-free.
      const int c = a.as_str().compare(b.as_str());
      cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
    } else {
      return fault(e, FaultKind::TypeMismatch,
                   std::string("cannot order ") + to_string(a.tag()) + " and " +
                       to_string(b.tag()));
    }
    switch (e.bin_op) {
      case BinOp::Lt: return vbool(cmp < 0);
      case BinOp::Le: return vbool(cmp <= 0);
      case BinOp::Gt: return vbool(cmp > 0);
      default: return vbool(cmp >= 0);
    }
  }

  Result<Value> eval_arith(const Expr& e, const Value& a, const Value& b) {
    if (a.is_int() && b.is_int()) {
      Result<int64_t> r = [&]() -> Result<int64_t> {
        switch (e.bin_op) {
          case BinOp::Add: return checked_add(a.as_int(), b.as_int());
          case BinOp::Sub: return checked_sub(a.as_int(), b.as_int());
          case BinOp::Mul: return checked_mul(a.as_int(), b.as_int());
          case BinOp::Div: return checked_div(a.as_int(), b.as_int());
          default: return checked_mod(a.as_int(), b.as_int());
        }
      }();
      if (!r.ok()) return located(r.fault(), e);
      return vint(r.value());
    }
    if (a.is_float() && b.is_float()) {
      const double x = a.as_float();
      const double y = b.as_float();
      switch (e.bin_op) {
        case BinOp::Add: return vfloat(x + y);
        case BinOp::Sub: return vfloat(x - y);
        case BinOp::Mul: return vfloat(x * y);
        case BinOp::Div: return vfloat(x / y);  // IEEE: /0 gives inf, no fault
        default:
          return fault(e, FaultKind::TypeMismatch, "'%' is Int-only");
      }
    }
    return fault(e, FaultKind::TypeMismatch,
                 std::string("cannot apply '") + to_string(e.bin_op) + "' to " +
                     to_string(a.tag()) + " and " + to_string(b.tag()));
  }

  Result<Value> eval_call(const Expr& e) {
    std::vector<Value> args;
    args.reserve(e.kids.size());
    for (const auto& kid : e.kids) {
      Result<Value> v = eval(*kid);
      if (!v.ok()) return v;
      args.push_back(v.take_value());
    }
    switch (e.builtin) {
      case Builtin::Split: {
        if (!args[0].is_str() || !args[1].is_str()) {
          return fault(e, FaultKind::TypeMismatch, "split needs (Str, Str)");
        }
        return vseq(split_str(args[0].as_str(), args[1].as_str()));
      }
      case Builtin::ParseInt: {
        if (!args[0].is_str()) return fault(e, FaultKind::TypeMismatch, "parseInt needs Str");
        return parse_int_builtin(e, args[0].as_str());
      }
      case Builtin::ParseFloat: {
        if (!args[0].is_str()) return fault(e, FaultKind::TypeMismatch, "parseFloat needs Str");
        return parse_float_builtin(e, args[0].as_str());
      }
      case Builtin::Len: {
        const Value& v = args[0];
        if (v.is_str()) return vint(static_cast<int64_t>(v.as_str().size()));
        if (v.is_seq() || v.is_tuple()) return vint(static_cast<int64_t>(v.items().size()));
        return fault(e, FaultKind::TypeMismatch, "len needs Str, Seq, or Tuple");
      }
      case Builtin::Substr: {
        if (!args[0].is_str() || !args[1].is_int() || !args[2].is_int()) {
          return fault(e, FaultKind::TypeMismatch, "substr needs (Str, Int, Int)");
        }
        const std::string& s = args[0].as_str();
        const int64_t from = args[1].as_int();
        const int64_t to = args[2].as_int();
        if (from < 0 || to < from || static_cast<size_t>(to) > s.size()) {
          return fault(e, FaultKind::IndexOutOfBounds,
                       "substr range [" + std::to_string(from) + "," + std::to_string(to) +
                           ") invalid for length " + std::to_string(s.size()));
        }
        return vstr(s.substr(static_cast<size_t>(from), static_cast<size_t>(to - from)));
      }
      case Builtin::Concat: {
        if (!args[0].is_str() || !args[1].is_str()) {
          return fault(e, FaultKind::TypeMismatch, "concat needs (Str, Str)");
        }
        return vstr(args[0].as_str() + args[1].as_str());
      }
      case Builtin::ToStr:
        if (args[0].is_str()) return args[0];
        return vstr(render_value(args[0]));
      case Builtin::Trim: {
        if (!args[0].is_str()) return fault(e, FaultKind::TypeMismatch, "trim needs Str");
        const std::string& s = args[0].as_str();
        size_t lo = 0;
        size_t hi = s.size();
        while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
        while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
        return vstr(s.substr(lo, hi - lo));
      }
    }
    throw std::logic_error("unreachable builtin");
  }

  /// Split by the full delimiter text, keeping empty fields ("a,,b" has
  /// three fields, "a," has two). An empty delimiter yields the whole input
  /// as a single element.
  static std::vector<Value> split_str(const std::string& s, const std::string& delim) {
    std::vector<Value> out;
    if (delim.empty()) {
      out.push_back(vstr(s));
      return out;
    }
    size_t start = 0;
    while (true) {
      const size_t at = s.find(delim, start);
      if (at == std::string::npos) {
        out.push_back(vstr(s.substr(start)));
        return out;
      }
      out.push_back(vstr(s.substr(start, at - start)));
      start = at + delim.size();
    }
  }

  Result<Value> parse_int_builtin(const Expr& e, const std::string& s) {
    // Strict: optional '-', then digits only, must fit in 64 bits.
    if (s.empty()) return fault(e, FaultKind::ParseFailure, "empty string is not an integer");
    size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size()) return fault(e, FaultKind::ParseFailure, "'-' is not an integer");
    for (size_t j = i; j < s.size(); ++j) {
      if (s[j] < '0' || s[j] > '9') {
        return fault(e, FaultKind::ParseFailure, "'" + s + "' is not an integer");
      }
    }
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      return fault(e, FaultKind::ParseFailure, "'" + s + "' does not fit a 64-bit integer");
    }
    return vint(v);
  }

  Result<Value> parse_float_builtin(const Expr& e, const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      return fault(e, FaultKind::ParseFailure, "'" + s + "' is not a float");
    }
    return vfloat(v);
  }

  const UdfAst& udf_;
  EventSink& sink_;
  std::vector<Value> env_;
};

}  // namespace

Result<Value> eval_udf(const UdfAst& udf, std::span<const Value> args, EventSink& sink) {
  if (args.size() != udf.params.size()) {
    throw std::logic_error("eval_udf: argument count does not match UDF arity");
  }
  return Evaluator(udf, args, sink).run();
}

}  // namespace flowfuzz
