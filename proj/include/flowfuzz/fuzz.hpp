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

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowfuzz/coverage.hpp"
#include "flowfuzz/dataflow.hpp"
#include "flowfuzz/pipeline.hpp"
#include "flowfuzz/schema.hpp"

namespace flowfuzz {

enum class MutatorKind { SchemaAware, RandomBytes };

/// Fuzzing loop parameters. Everything that affects trial outcomes is in
/// here, so (pipeline, schema, config) fully determines a run.
struct FuzzConfig {
  uint64_t max_trials = 10000;
  std::optional<uint64_t> max_duration_ms;  // wall clock budget, if any
  uint64_t rng_seed = 1;
  double p_generate = 0.2;  // fresh generation vs corpus mutation
  int min_rows = 1;         // rows per generated input, inclusive range
  int max_rows = 5;
  MutatorKind mutator = MutatorKind::SchemaAware;
};

/// An input retained because it added coverage. Crashing inputs are saved as
/// crash witnesses instead and never become mutation parents.
struct CorpusEntry {
  int id = 0;  // ordinal, numbers the corpus/NNNN.csv file
  TestInput input;
  CoverageMap coverage;  // full map achieved on admission
  CoverageMap novel;     // the keys that justified admission
  uint64_t discovered_at = 0;
};

struct CrashRecord {
  CrashId id;
  int witness = 0;  // ordinal, numbers the crashes/NNNN.csv file
  uint64_t first_trial = 0;
  TestInput input;
  RuntimeFault fault;
};

struct FuzzReport {
  std::string pipeline_name;
  uint64_t trials = 0;
  size_t universe_size = 0;
  CoverageMap covered;
  std::vector<CoverageKey> missing;  // universe keys never covered
  std::vector<CrashRecord> crashes;  // discovery order
  std::vector<CorpusEntry> corpus;
  std::optional<uint64_t> first_crash_trial;
  uint64_t wall_ms = 0;
  uint64_t execs_per_sec = 0;
};

/// Pick the next trial input: with probability p_generate (or always while
/// the corpus is empty) generate fresh valid rows, otherwise mutate a
/// uniformly chosen corpus entry with the configured mutator.
TestInput next_input(const std::vector<CorpusEntry>& corpus, const Schema& schema, Rng& rng,
                     const FuzzConfig& config);

struct TrialOutcome {
  size_t new_keys = 0;
  std::optional<RuntimeFault> fault;
  bool new_crash = false;
  CoverageMap trial_coverage;
  CoverageMap novel;
};

/// Execute one input, merge its coverage into `cumulative`, and classify any
/// fault against the known crash set. Every observed key is checked against
/// the static universe.
TrialOutcome run_trial(const PipelineSpec& spec, const TestInput& input,
                       CoverageMap& cumulative, std::set<CrashId>& crash_set,
                       const std::set<CoverageKey>& universe);

struct FuzzProgress {
  uint64_t trials = 0;
  size_t covered = 0;
  size_t universe = 0;
  size_t crashes = 0;
  uint64_t elapsed_ms = 0;
};

struct RunHooks {
  /// Artifact directory; empty disables artifact writing.
  std::string out_dir;
  /// Seed inputs admitted unconditionally after a coverage-measuring run.
  std::vector<TestInput> seeds;
  /// Polled each trial; set to request a clean early stop.
  const std::atomic<bool>* stop = nullptr;
  /// Called periodically with running statistics.
  std::function<void(const FuzzProgress&)> on_progress;
};

/// The fuzzing loop: next_input -> run_trial until the trial budget, the
/// duration budget, or a stop request ends the run. Trial faults are data,
/// not errors. Artifacts (corpus/, crashes/, report.txt, stats.csv) land in
/// hooks.out_dir when set, and every saved artifact is replayed before the
/// function returns to confirm it reproduces the novelty that saved it.
FuzzReport run_fuzz(const PipelineSpec& spec, const Schema& schema, const FuzzConfig& config,
                    const RunHooks& hooks = {});

/// Canonical report text. Deterministic for a fixed (pipeline, schema,
/// config) except for '#'-prefixed timing lines at the end.
std::string render_report(const FuzzReport& report);

std::string render_dataset(const Dataset& dataset);

/// Build the record view of raw input rows (one Str record per line).
Dataset dataset_from(const TestInput& input);

TestInput input_from_lines(std::vector<std::string> lines);

}  // namespace flowfuzz
