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

#include "flowfuzz/dataflow.hpp"

#include <map>
#include <stdexcept>

namespace flowfuzz {

namespace {

RuntimeFault op_fault(int op_id, FaultKind kind, std::string message) {
  return RuntimeFault{kind, std::nullopt, op_id, std::move(message)};
}

/// Keyed operators require (key, value) 2-tuples.
Result<bool> check_pair(int op_id, const Record& r) {
  if (!r.is_tuple() || r.items().size() != 2) {
    return op_fault(op_id, FaultKind::TypeMismatch,
                    "keyed operator needs (key, value) pairs, got " +
                        std::string(to_string(r.tag())));
  }
  return true;
}

}  // namespace

Result<Dataset> exec_map(int op_id, const UdfAst& udf, const Dataset& input, EventSink& sink) {
  Dataset out;
  out.rows.reserve(input.rows.size());
  for (const Record& r : input.rows) {
    Result<Value> v = eval_udf(udf, std::span(&r, 1), sink);
    if (!v.ok()) return v.fault();
    out.rows.push_back(v.take_value());
  }
  sink.emit(DataflowEvent{op_id, 0});
  return out;
}

Result<Dataset> exec_filter(int op_id, const UdfAst& predicate, const Dataset& input,
                            EventSink& sink) {
  Dataset out;
  for (const Record& r : input.rows) {
    Result<Value> v = eval_udf(predicate, std::span(&r, 1), sink);
    if (!v.ok()) return v.fault();
    if (!v.value().is_bool()) {
      return op_fault(op_id, FaultKind::TypeMismatch,
                      "filter predicate returned " + std::string(to_string(v.value().tag())));
    }
    if (v.value().as_bool()) out.rows.push_back(r);
  }
  sink.emit(DataflowEvent{op_id, out.rows.empty() ? 0 : 1});
  return out;
}

Result<Dataset> exec_flatmap(int op_id, const UdfAst& udf, const Dataset& input,
                             EventSink& sink) {
  Dataset out;
  for (const Record& r : input.rows) {
    Result<Value> v = eval_udf(udf, std::span(&r, 1), sink);
    if (!v.ok()) return v.fault();
    if (!v.value().is_seq()) {
      return op_fault(op_id, FaultKind::TypeMismatch,
                      "flatMap expects a Seq result, got " +
                          std::string(to_string(v.value().tag())));
    }
    for (const Value& item : v.value().items()) out.rows.push_back(item);
  }
  sink.emit(DataflowEvent{op_id, out.rows.empty() ? 0 : 1});
  return out;
}

Result<Dataset> exec_reduce_by_key(int op_id, const UdfAst& udf, const Dataset& input,
                                   EventSink& sink) {
  struct Group {
    Value key;
    std::vector<Value> values;
  };
  std::vector<Group> groups;  // first-appearance order
  for (const Record& r : input.rows) {
    Result<bool> pair_ok = check_pair(op_id, r);
    if (!pair_ok.ok()) return pair_ok.fault();
    const Value& key = r.items()[0];
    const Value& value = r.items()[1];
    Group* found = nullptr;
    for (Group& g : groups) {
      Result<bool> eq = value_eq(g.key, key);
      if (!eq.ok()) return eq.fault().at(std::nullopt, op_id);
      if (eq.value()) {
        found = &g;
        break;
      }
    }
    if (found) {
      found->values.push_back(value);
    } else {
      groups.push_back(Group{key, {value}});
    }
  }
  Dataset out;
  bool any_single = false;
  bool any_folded = false;
  for (Group& g : groups) {
    Value acc = g.values[0];
    if (g.values.size() == 1) {
      any_single = true;
    } else {
      any_folded = true;
      for (size_t i = 1; i < g.values.size(); ++i) {
        const Value args[2] = {std::move(acc), g.values[i]};
        Result<Value> v = eval_udf(udf, args, sink);
        if (!v.ok()) return v.fault();
        acc = v.take_value();
      }
    }
    out.rows.push_back(vtuple({std::move(g.key), std::move(acc)}));
  }
  if (any_single) sink.emit(DataflowEvent{op_id, 0});
  if (any_folded) sink.emit(DataflowEvent{op_id, 1});
  return out;
}

Result<Dataset> exec_mapvalues(int op_id, const UdfAst& udf, const Dataset& input,
                               EventSink& sink) {
  Dataset out;
  out.rows.reserve(input.rows.size());
  for (const Record& r : input.rows) {
    Result<bool> pair_ok = check_pair(op_id, r);
    if (!pair_ok.ok()) return pair_ok.fault();
    const Value& value = r.items()[1];
    Result<Value> v = eval_udf(udf, std::span(&value, 1), sink);
    if (!v.ok()) return v.fault();
    out.rows.push_back(vtuple({r.items()[0], v.take_value()}));
  }
  sink.emit(DataflowEvent{op_id, 0});
  return out;
}

Result<Dataset> exec_reduce(int op_id, const UdfAst& udf, const Dataset& input, EventSink& sink) {
  if (input.rows.empty()) {
    return op_fault(op_id, FaultKind::EmptyReduce, "reduce over an empty dataset");
  }
  Value acc = input.rows[0];
  for (size_t i = 1; i < input.rows.size(); ++i) {
    const Value args[2] = {std::move(acc), input.rows[i]};
    Result<Value> v = eval_udf(udf, args, sink);
    if (!v.ok()) return v.fault();
    acc = v.take_value();
  }
  sink.emit(DataflowEvent{op_id, input.rows.size() >= 2 ? 1 : 0});
  Dataset out;
  out.rows.push_back(std::move(acc));
  return out;
}

Result<Dataset> exec_join(int op_id, const Dataset& left, const Dataset& right, EventSink& sink) {
  for (const Record& r : left.rows) {
    Result<bool> ok = check_pair(op_id, r);
    if (!ok.ok()) return ok.fault();
  }
  for (const Record& r : right.rows) {
    Result<bool> ok = check_pair(op_id, r);
    if (!ok.ok()) return ok.fault();
  }
  Dataset out;
  std::vector<bool> right_matched(right.rows.size(), false);
  bool any_match = false;
  bool any_unmatched = false;
  for (const Record& l : left.rows) {
    bool left_matched = false;
    for (size_t j = 0; j < right.rows.size(); ++j) {
      const Record& r = right.rows[j];
      Result<bool> eq = value_eq(l.items()[0], r.items()[0]);
      if (!eq.ok()) return eq.fault().at(std::nullopt, op_id);
      if (!eq.value()) continue;
      left_matched = true;
      right_matched[j] = true;
      any_match = true;
      out.rows.push_back(vtuple({l.items()[0], vtuple({l.items()[1], r.items()[1]})}));
    }
    if (!left_matched) any_unmatched = true;
  }
  for (size_t j = 0; j < right.rows.size(); ++j) {
    if (!right_matched[j]) any_unmatched = true;
  }
  if (any_unmatched) sink.emit(DataflowEvent{op_id, 0});
  if (any_match) sink.emit(DataflowEvent{op_id, 1});
  return out;
}

Result<Dataset> exec_distinct(int op_id, const Dataset& input, EventSink& sink) {
  Dataset out;
  bool removed = false;
  for (const Record& r : input.rows) {
    bool seen = false;
    for (const Record& kept : out.rows) {
      Result<bool> eq = value_eq(kept, r);
      if (!eq.ok()) return eq.fault().at(std::nullopt, op_id);
      if (eq.value()) {
        seen = true;
        break;
      }
    }
    if (seen) {
      removed = true;
    } else {
      out.rows.push_back(r);
    }
  }
  sink.emit(DataflowEvent{op_id, removed ? 1 : 0});
  return out;
}

Result<Dataset> exec_union(int op_id, const Dataset& left, const Dataset& right,
                           EventSink& sink) {
  Dataset out;
  out.rows.reserve(left.rows.size() + right.rows.size());
  out.rows.insert(out.rows.end(), left.rows.begin(), left.rows.end());
  out.rows.insert(out.rows.end(), right.rows.begin(), right.rows.end());
  sink.emit(DataflowEvent{op_id, 0});
  return out;
}

Result<Dataset> exec_pipeline(const PipelineSpec& spec, const Dataset& source_rows,
                              EventSink& sink) {
  // Every source sees the same rows: fuzzed inputs come from one schema.
  std::map<int, Dataset> produced;
  auto input_of = [&](int ref) -> const Dataset& {
    if (is_source_ref(ref)) return source_rows;
    return produced.at(ref);
  };

  for (int op_id : topo_order(spec)) {
    const OperatorNode& node = spec.node(op_id);
    const Dataset& first = input_of(node.upstream[0]);
    const UdfAst* udf = node.udf_ref ? spec.find_udf(*node.udf_ref) : nullptr;
    Result<Dataset> result = [&]() -> Result<Dataset> {
      switch (node.kind) {
        case OperatorKind::Map: return exec_map(op_id, *udf, first, sink);
        case OperatorKind::Filter: return exec_filter(op_id, *udf, first, sink);
        case OperatorKind::FlatMap: return exec_flatmap(op_id, *udf, first, sink);
        case OperatorKind::MapValues: return exec_mapvalues(op_id, *udf, first, sink);
        case OperatorKind::ReduceByKey: return exec_reduce_by_key(op_id, *udf, first, sink);
        case OperatorKind::Reduce: return exec_reduce(op_id, *udf, first, sink);
        case OperatorKind::Join:
          return exec_join(op_id, first, input_of(node.upstream[1]), sink);
        case OperatorKind::Distinct: return exec_distinct(op_id, first, sink);
        case OperatorKind::Union:
          return exec_union(op_id, first, input_of(node.upstream[1]), sink);
      }
      throw std::logic_error("unreachable operator kind");
    }();
    if (!result.ok()) return result.fault();
    produced.emplace(op_id, result.take_value());
  }

  const int sink_ref = spec.sinks[0];
  if (is_source_ref(sink_ref)) return source_rows;
  return std::move(produced.at(sink_ref));
}

}  // namespace flowfuzz
