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

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowfuzz/diag.hpp"
#include "flowfuzz/events.hpp"
#include "flowfuzz/value.hpp"

namespace flowfuzz {

// UDF bodies are a small loop-free expression language: literals, variables,
// let-bindings, tuple construction, indexing, arithmetic, comparisons,
// short-circuit logic, if/else, and a fixed builtin set. Loops and recursion
// are deliberately absent so the branch universe stays finite.

enum class ExprKind {
  Literal,
  Var,
  Let,
  TupleCtor,
  Index,
  Unary,
  Binary,
  If,
  Call,
};

enum class UnOp { Neg, Not };

enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

enum class Builtin { Split, ParseInt, ParseFloat, Len, Substr, Concat, ToStr, Trim };

const char* to_string(BinOp op);
const char* to_string(Builtin b);

/// One expression node. node_ids are unique within a UDF and assigned in
/// pre-order after parsing, so they are stable across runs of the same file.
struct Expr {
  int node_id = -1;
  int line = 0;
  int col = 0;
  ExprKind kind = ExprKind::Literal;

  Value literal;             // Literal
  int slot = -1;             // Var: index into the evaluation environment
  std::string name;          // Var/Let binder name (diagnostics, rendering)
  UnOp un_op = UnOp::Neg;    // Unary
  BinOp bin_op = BinOp::Add; // Binary
  Builtin builtin = Builtin::Split;  // Call
  std::vector<std::unique_ptr<Expr>> kids;
};

/// A parsed UDF: body tree plus the if-node ids that define its branch
/// coverage universe.
struct UdfAst {
  int udf_id = 0;
  std::string name;
  std::vector<std::string> params;
  std::unique_ptr<Expr> body;
  std::vector<int> branch_ids;  // pre-order ids of if-nodes
  int node_count = 0;
};

/// Parse a UDF body. Performs static scope resolution (unbound variables are
/// parse errors) and builtin arity checks. base_line/base_col anchor
/// diagnostics when the body is embedded in a larger file.
ParseResult<UdfAst> parse_udf_body(std::string_view body, std::vector<std::string> params,
                                   std::string name = "", int udf_id = 0, int base_line = 1,
                                   int base_col = 1);

/// Evaluate a UDF on the given arguments. Deterministic; emits exactly one
/// BranchEvent per dynamically reached if-node (condition outcome as the
/// arm). Faults carry (udf_id, node_id) of the failing node. Short-circuited
/// operands are neither evaluated nor counted.
Result<Value> eval_udf(const UdfAst& udf, std::span<const Value> args, EventSink& sink);

/// Pretty-print a body back to parseable source text.
std::string render_expr(const Expr& e);

}  // namespace flowfuzz
