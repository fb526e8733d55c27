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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowfuzz/coverage.hpp"
#include "flowfuzz/diag.hpp"
#include "flowfuzz/udf.hpp"

namespace flowfuzz {

enum class OperatorKind { Map, Filter, FlatMap, MapValues, ReduceByKey, Reduce, Join, Distinct, Union };

const char* to_string(OperatorKind kind);
std::optional<OperatorKind> operator_kind_from(std::string_view name);

/// Join and Union take two upstreams; everything else takes one.
int kind_upstream_count(OperatorKind kind);

/// Map/Filter/FlatMap/MapValues/ReduceByKey/Reduce carry exactly one UDF;
/// Join/Distinct/Union carry none.
bool kind_needs_udf(OperatorKind kind);

/// Required UDF arity: 2 for the fold operators, 1 otherwise.
int kind_udf_arity(OperatorKind kind);

/// Number of dataflow equivalence-class arms the operator can report.
/// Map/MapValues/Union have a single executed-arm class; the rest split on
/// a terminating vs non-terminating outcome (empty/non-empty output, single
/// vs folded group, matched vs unmatched key, duplicate removed or not).
int kind_arm_count(OperatorKind kind);

// Upstream references name either an operator node (positive op_id) or a
// pipeline source (encoded negative).
constexpr int source_ref(int source_index) { return -(source_index + 1); }
constexpr bool is_source_ref(int ref) { return ref < 0; }
constexpr int source_index_of(int ref) { return -ref - 1; }

struct OperatorNode {
  int op_id = 0;  // unique, assigned in textual order starting at 1
  OperatorKind kind = OperatorKind::Map;
  std::optional<std::string> udf_ref;
  std::vector<int> upstream;  // length 1 or 2 (see source_ref encoding)
  std::string output_name;
  int line = 0;
};

/// A validated dataflow DAG plus its UDF table. Immutable after parse.
struct PipelineSpec {
  std::string name;
  std::vector<std::string> source_names;
  std::vector<OperatorNode> nodes;  // nodes[i].op_id == i + 1
  std::vector<int> sinks;           // node or source refs, at least one
  std::map<std::string, UdfAst> udfs;

  const OperatorNode& node(int op_id) const { return nodes[static_cast<size_t>(op_id - 1)]; }
  const UdfAst* find_udf(const std::string& udf_name) const {
    auto it = udfs.find(udf_name);
    return it == udfs.end() ? nullptr : &it->second;
  }
};

/// Parse the pipeline DSL (one statement per line, '#' comments, UDF bodies
/// brace-delimited and free to span lines):
///
///   pipeline <name>
///   source <name> : text
///   <name> = <opkind>(<upstream>[, <upstream>]) [with udf <udfname>]
///   sink <name>
///   udf <udfname>(<param>[, <param>]) { <body> }
///
/// On success every PipelineSpec invariant holds: the graph is acyclic, all
/// references resolve, and every referenced UDF has the arity its operator
/// requires.
ParseResult<PipelineSpec> parse_pipeline(std::string_view source_text);

/// Execution order: every node after all of its upstreams, ties broken by
/// ascending op_id.
std::vector<int> topo_order(const PipelineSpec& spec);

/// The static JDU coverage universe: one DataflowKey per (node, arm) and one
/// BranchKey per (referenced UDF, if-node, outcome). Sorted, duplicate-free.
/// Every coverage map produced by executing the pipeline is a subset.
std::vector<CoverageKey> jdu_universe(const PipelineSpec& spec);

/// Pretty-print the spec back to DSL text (debugging, fixpoint tests).
std::string render_pipeline(const PipelineSpec& spec);

}  // namespace flowfuzz
