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

#include "flowfuzz/coverage.hpp"

#include <algorithm>

namespace flowfuzz {

bool CoverageMap::subset_of(const CoverageMap& other) const {
  return std::includes(other.keys.begin(), other.keys.end(), keys.begin(), keys.end());
}

CoverageMap collect(std::span<const Event> events) {
  CoverageMap map;
  for (const Event& e : events) {
    if (const auto* d = std::get_if<DataflowEvent>(&e)) {
      map.keys.insert(DataflowKey{d->op_id, d->arm});
    } else {
      const auto& b = std::get<BranchEvent>(e);
      map.keys.insert(BranchKey{b.udf_id, b.branch_id, b.arm});
    }
  }
  return map;
}

size_t merge_novel(CoverageMap& cumulative, const CoverageMap& trial) {
  size_t added = 0;
  for (const CoverageKey& k : trial.keys) {
    if (cumulative.keys.insert(k).second) ++added;
  }
  return added;
}

CrashId crash_id(const RuntimeFault& fault) {
  return CrashId{fault.kind, fault.udf_id, fault.node_id};
}

std::string render_key(const CoverageKey& key) {
  if (const auto* d = std::get_if<DataflowKey>(&key)) {
    return "dataflow op=" + std::to_string(d->op_id) + " arm=" + std::to_string(d->arm);
  }
  const auto& b = std::get<BranchKey>(key);
  return "branch udf=" + std::to_string(b.udf_id) + " node=" + std::to_string(b.branch_id) +
         " arm=" + (b.arm ? "true" : "false");
}

std::string render_coverage(const CoverageMap& map) {
  std::string out;
  for (const CoverageKey& k : map.keys) {
    out += render_key(k);
    out += '\n';
  }
  return out;
}

std::string render_crash_id(const CrashId& id) {
  std::string out = to_string(id.kind);
  out += " udf=";
  out += id.udf_id ? std::to_string(*id.udf_id) : "none";
  out += " node=" + std::to_string(id.node_id);
  return out;
}

}  // namespace flowfuzz
