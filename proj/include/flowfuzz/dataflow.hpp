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

#include "flowfuzz/events.hpp"
#include "flowfuzz/pipeline.hpp"
#include "flowfuzz/value.hpp"

namespace flowfuzz {

// Executable specifications of the dataflow operators: simplified in-process
// implementations with deterministic ordering (input order; first-appearance
// order for grouping). Each invocation reports which equivalence-class arm it
// exercised via a DataflowEvent; UDF evaluation routes branch events into the
// same sink. The first fault aborts the operator and propagates; events
// emitted before the fault stay in the sink.

/// Per-element map. Output length equals input length; always emits arm 0.
Result<Dataset> exec_map(int op_id, const UdfAst& udf, const Dataset& input, EventSink& sink);

/// Keeps records whose predicate is Bool(true), preserving input order.
/// Emits arm 1 iff the output is non-empty, else arm 0 (computed once per
/// invocation over the whole output). A non-Bool predicate result is a
/// TypeMismatch.
Result<Dataset> exec_filter(int op_id, const UdfAst& predicate, const Dataset& input,
                            EventSink& sink);

/// Concatenates per-record Seq results in input order; arm 1 iff output
/// non-empty. A non-Seq UDF result is a TypeMismatch.
Result<Dataset> exec_flatmap(int op_id, const UdfAst& udf, const Dataset& input, EventSink& sink);

/// Groups (key, value) pairs by key and left-folds each group's values with
/// the 2-arg UDF in first-appearance order. Emits arm 0 if any group had a
/// single value (fold skipped) and arm 1 if any group folded; both can fire
/// in one invocation. Non-pair records are a TypeMismatch.
Result<Dataset> exec_reduce_by_key(int op_id, const UdfAst& udf, const Dataset& input,
                                   EventSink& sink);

/// (k, v) -> (k, udf(v)); order preserved; always emits arm 0.
Result<Dataset> exec_mapvalues(int op_id, const UdfAst& udf, const Dataset& input,
                               EventSink& sink);

/// Left-fold of the whole dataset into a single record. Arm 1 when the fold
/// ran (>= 2 records), arm 0 for the single-record pass-through. Empty input
/// is an EmptyReduce fault.
Result<Dataset> exec_reduce(int op_id, const UdfAst& udf, const Dataset& input, EventSink& sink);

/// Inner join on pair keys: (k, (lv, rv)) for every matching cross pair,
/// ordered by left then right appearance. Emits arm 1 if any key matched and
/// arm 0 if any key on either side went unmatched; both can fire.
Result<Dataset> exec_join(int op_id, const Dataset& left, const Dataset& right, EventSink& sink);

/// Keeps first occurrences under value_eq; arm 1 iff a duplicate was removed.
Result<Dataset> exec_distinct(int op_id, const Dataset& input, EventSink& sink);

/// Concatenates left then right; always emits arm 0.
Result<Dataset> exec_union(int op_id, const Dataset& left, const Dataset& right, EventSink& sink);

/// Runs the whole pipeline in topological order, feeding source_rows to every
/// source, and returns the first sink's dataset. The first operator fault
/// aborts the run and is returned; events up to that point are retained.
Result<Dataset> exec_pipeline(const PipelineSpec& spec, const Dataset& source_rows,
                              EventSink& sink);

}  // namespace flowfuzz
