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

#include <variant>
#include <vector>

namespace flowfuzz {

/// One equivalence-class observation from a dataflow operator: which arm of
/// the operator's behavior the whole invocation exercised (e.g. filter output
/// empty vs non-empty).
struct DataflowEvent {
  int op_id = 0;
  int arm = 0;
};

/// One conditional outcome inside a UDF, emitted every time an if-node is
/// dynamically evaluated.
struct BranchEvent {
  int udf_id = 0;
  int branch_id = 0;
  bool arm = false;
};

using Event = std::variant<DataflowEvent, BranchEvent>;

/// Per-execution event stream. Each pipeline execution owns its sink, so
/// running many executions in parallel just means one sink per worker.
class EventSink {
 public:
  void emit(DataflowEvent e) { events_.push_back(e); }
  void emit(BranchEvent e) { events_.push_back(e); }

  const std::vector<Event>& events() const { return events_; }
  void clear() { events_.clear(); }

 private:
  std::vector<Event> events_;
};

}  // namespace flowfuzz
