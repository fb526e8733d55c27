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

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>

#include "flowfuzz/events.hpp"
#include "flowfuzz/value.hpp"

namespace flowfuzz {

/// Coverage point for one dataflow equivalence-class arm.
struct DataflowKey {
  int op_id = 0;
  int arm = 0;
  auto operator<=>(const DataflowKey&) const = default;
};

/// Coverage point for one UDF conditional outcome.
struct BranchKey {
  int udf_id = 0;
  int branch_id = 0;
  bool arm = false;
  auto operator<=>(const BranchKey&) const = default;
};

/// One point of the joint dataflow + UDF coverage universe. Totally ordered
/// so reports render canonically.
using CoverageKey = std::variant<DataflowKey, BranchKey>;

/// Set of coverage points hit so far. Novelty is binary (a key is either
/// covered or not); there are no hit-count buckets.
struct CoverageMap {
  std::set<CoverageKey> keys;

  bool contains(const CoverageKey& k) const { return keys.count(k) != 0; }
  size_t size() const { return keys.size(); }
  bool subset_of(const CoverageMap& other) const;
};

/// Fold an event stream into a coverage map. Order-insensitive and
/// idempotent over repeated events.
CoverageMap collect(std::span<const Event> events);

/// Union `trial` into `cumulative`; returns how many keys were new.
size_t merge_novel(CoverageMap& cumulative, const CoverageMap& trial);

/// Identity of a unique crash: fault kind plus where it happened. The
/// free-text message is deliberately dropped.
struct CrashId {
  FaultKind kind = FaultKind::TypeMismatch;
  std::optional<int> udf_id;
  int node_id = -1;
  auto operator<=>(const CrashId&) const = default;
};

CrashId crash_id(const RuntimeFault& fault);

std::string render_key(const CoverageKey& key);

/// Canonical rendering: sorted keys, one per line (trailing newline when
/// non-empty). Golden tests and reports both use this.
std::string render_coverage(const CoverageMap& map);

std::string render_crash_id(const CrashId& id);

}  // namespace flowfuzz
