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

#include "flowfuzz/fuzz.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace flowfuzz {

namespace {

// Stacked mutations per trial, drawn uniformly; small stacks keep most of the
// record structure intact.
constexpr int kMinMutations = 1;
constexpr int kMaxMutations = 5;

uint64_t now_ms(std::chrono::steady_clock::time_point since) {
  return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - since)
                                   .count());
}

std::string artifact_name(int ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d.csv", ordinal);
  return buf;
}

void write_input_file(const std::filesystem::path& path, const TestInput& input) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const std::string& row : input.rows) {
    out << row << '\n';
  }
}

std::string format_ratio(size_t covered, size_t universe) {
  const double ratio = universe == 0 ? 1.0 : static_cast<double>(covered) /
                                                 static_cast<double>(universe);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.4f", ratio);
  return buf;
}

/// Replays every saved artifact and checks it still produces the novelty
/// that justified saving it. A mismatch means the engine lost determinism,
/// which is a defect, not input data.
void verify_artifacts(const PipelineSpec& spec, const FuzzReport& report) {
  for (const CorpusEntry& entry : report.corpus) {
    EventSink sink;
    Result<Dataset> result = exec_pipeline(spec, dataset_from(entry.input), sink);
    if (!result.ok()) {
      throw std::logic_error("corpus entry " + std::to_string(entry.id) +
                             " crashed on replay");
    }
    const CoverageMap replayed = collect(sink.events());
    if (!(replayed.keys == entry.coverage.keys) || !entry.novel.subset_of(replayed)) {
      throw std::logic_error("corpus entry " + std::to_string(entry.id) +
                             " no longer reproduces its coverage");
    }
  }
  for (const CrashRecord& crash : report.crashes) {
    EventSink sink;
    Result<Dataset> result = exec_pipeline(spec, dataset_from(crash.input), sink);
    if (result.ok() || !(crash_id(result.fault()) == crash.id)) {
      throw std::logic_error("crash witness " + std::to_string(crash.witness) +
                             " no longer reproduces its crash");
    }
  }
}

}  // namespace

Dataset dataset_from(const TestInput& input) {
  Dataset d;
  d.rows.reserve(input.rows.size());
  for (const std::string& row : input.rows) d.rows.push_back(vstr(row));
  return d;
}

TestInput input_from_lines(std::vector<std::string> lines) {
  TestInput input;
  input.rows = std::move(lines);
  return input;
}

TestInput next_input(const std::vector<CorpusEntry>& corpus, const Schema& schema, Rng& rng,
                     const FuzzConfig& config) {
  if (corpus.empty() || rng.chance(config.p_generate)) {
    const auto rows = static_cast<size_t>(
        rng.uniform_int(config.min_rows, config.max_rows));
    return generate_valid(schema, rng, rows);
  }
  const CorpusEntry& parent = corpus[rng.below(corpus.size())];
  const int k = static_cast<int>(rng.uniform_int(kMinMutations, kMaxMutations));
  if (config.mutator == MutatorKind::SchemaAware) {
    return mutate(schema, parent.input, rng, k, parent.id);
  }
  return random_byte_mutate(parent.input, rng, k, ByteMutateMode::Mixed, parent.id);
}

TrialOutcome run_trial(const PipelineSpec& spec, const TestInput& input,
                       CoverageMap& cumulative, std::set<CrashId>& crash_set,
                       const std::set<CoverageKey>& universe) {
  EventSink sink;
  Result<Dataset> result = exec_pipeline(spec, dataset_from(input), sink);

  TrialOutcome outcome;
  outcome.trial_coverage = collect(sink.events());
  for (const CoverageKey& key : outcome.trial_coverage.keys) {
    if (!universe.count(key)) {
      throw std::logic_error("coverage key outside the static universe: " + render_key(key));
    }
    if (!cumulative.contains(key)) outcome.novel.keys.insert(key);
  }
  outcome.new_keys = merge_novel(cumulative, outcome.trial_coverage);

  if (!result.ok()) {
    outcome.fault = result.fault();
    outcome.new_crash = crash_set.insert(crash_id(result.fault())).second;
  }
  return outcome;
}

FuzzReport run_fuzz(const PipelineSpec& spec, const Schema& schema, const FuzzConfig& config,
                    const RunHooks& hooks) {
  namespace fs = std::filesystem;
  if (config.p_generate < 0.0 || config.p_generate > 1.0) {
    throw std::invalid_argument("p_generate must be within [0, 1]");
  }
  if (config.min_rows < 1 || config.max_rows < config.min_rows) {
    throw std::invalid_argument("rows-per-input range is empty");
  }
  const auto started = std::chrono::steady_clock::now();

  Rng rng(config.rng_seed);
  const std::vector<CoverageKey> universe_list = jdu_universe(spec);
  const std::set<CoverageKey> universe(universe_list.begin(), universe_list.end());

  FuzzReport report;
  report.pipeline_name = spec.name;
  report.universe_size = universe.size();

  std::set<CrashId> crash_set;
  std::ofstream stats;
  const bool writing = !hooks.out_dir.empty();
  if (writing) {
    fs::create_directories(fs::path(hooks.out_dir) / "corpus");
    fs::create_directories(fs::path(hooks.out_dir) / "crashes");
    stats.open(fs::path(hooks.out_dir) / "stats.csv", std::ios::binary);
    if (!stats) throw std::runtime_error("cannot write stats.csv under " + hooks.out_dir);
    stats << "trial,covered,crashes,elapsed_ms\n";
  }

  auto admit = [&](const TestInput& input, const TrialOutcome& outcome, uint64_t trial) {
    CorpusEntry entry;
    entry.id = static_cast<int>(report.corpus.size()) + 1;
    entry.input = input;
    entry.coverage = outcome.trial_coverage;
    entry.novel = outcome.novel;
    entry.discovered_at = trial;
    if (writing) {
      write_input_file(fs::path(hooks.out_dir) / "corpus" / artifact_name(entry.id),
                       entry.input);
    }
    report.corpus.push_back(std::move(entry));
  };

  // Seed inputs are admitted unconditionally, after measuring their coverage.
  for (const TestInput& seed : hooks.seeds) {
    TrialOutcome outcome = run_trial(spec, seed, report.covered, crash_set, universe);
    if (outcome.fault) {
      // A crashing seed is a finding, not a corpus entry.
      CrashRecord crash{crash_id(*outcome.fault), static_cast<int>(report.crashes.size()) + 1,
                        0, seed, *outcome.fault};
      if (writing) {
        write_input_file(fs::path(hooks.out_dir) / "crashes" / artifact_name(crash.witness),
                         crash.input);
      }
      report.crashes.push_back(std::move(crash));
      continue;
    }
    admit(seed, outcome, 0);
  }

  uint64_t trial = 0;
  while (trial < config.max_trials) {
    if (hooks.stop && hooks.stop->load(std::memory_order_relaxed)) break;
    if (config.max_duration_ms && (trial & 63) == 0 &&
        now_ms(started) >= *config.max_duration_ms) {
      break;
    }
    ++trial;

    const TestInput input = next_input(report.corpus, schema, rng, config);
    const TrialOutcome outcome = run_trial(spec, input, report.covered, crash_set, universe);

    if (outcome.fault) {
      if (!report.first_crash_trial) report.first_crash_trial = trial;
      if (outcome.new_crash) {
        CrashRecord crash{crash_id(*outcome.fault),
                          static_cast<int>(report.crashes.size()) + 1, trial, input,
                          *outcome.fault};
        if (writing) {
          write_input_file(fs::path(hooks.out_dir) / "crashes" / artifact_name(crash.witness),
                           crash.input);
        }
        report.crashes.push_back(std::move(crash));
      }
    } else if (outcome.new_keys > 0) {
      admit(input, outcome, trial);
    }

    if (writing) {
      stats << trial << ',' << report.covered.size() << ',' << report.crashes.size() << ','
            << now_ms(started) << '\n';
    }
    if (hooks.on_progress && ((trial & 255) == 0 || trial == config.max_trials)) {
      const uint64_t elapsed = now_ms(started);
      hooks.on_progress(FuzzProgress{trial, report.covered.size(), universe.size(),
                                     report.crashes.size(), elapsed});
    }
  }

  report.trials = trial;
  for (const CoverageKey& key : universe) {
    if (!report.covered.contains(key)) report.missing.push_back(key);
  }

  const uint64_t wall = now_ms(started);
  report.wall_ms = wall;
  report.execs_per_sec = wall == 0 ? trial * 1000 : trial * 1000 / wall;

  verify_artifacts(spec, report);

  if (hooks.on_progress) {
    hooks.on_progress(FuzzProgress{trial, report.covered.size(), universe.size(),
                                   report.crashes.size(), wall});
  }
  if (writing) {
    std::ofstream out(fs::path(hooks.out_dir) / "report.txt", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report.txt under " + hooks.out_dir);
    out << render_report(report);
  }
  return report;
}

std::string render_report(const FuzzReport& report) {
  std::string out;
  out += "pipeline: " + report.pipeline_name + "\n";
  out += "trials: " + std::to_string(report.trials) + "\n";
  out += "universe: " + std::to_string(report.universe_size) + "\n";
  out += "covered: " + std::to_string(report.covered.size()) + "\n";
  out += "coverage_ratio: " + format_ratio(report.covered.size(), report.universe_size) + "\n";
  out += "unique_crashes: " + std::to_string(report.crashes.size()) + "\n";
  out += "corpus_entries: " + std::to_string(report.corpus.size()) + "\n";
  out += "first_crash_trial: " +
         (report.first_crash_trial ? std::to_string(*report.first_crash_trial)
                                   : std::string("none")) +
         "\n";
  if (!report.crashes.empty()) {
    out += "crashes:\n";
    for (const CrashRecord& crash : report.crashes) {
      out += "  " + render_crash_id(crash.id) + " witness=" + artifact_name(crash.witness) +
             " first_trial=" + std::to_string(crash.first_trial) + "\n";
    }
  }
  out += "coverage:\n";
  for (const CoverageKey& key : report.covered.keys) {
    out += "  " + render_key(key) + "\n";
  }
  if (!report.missing.empty()) {
    out += "missing:\n";
    for (const CoverageKey& key : report.missing) {
      out += "  " + render_key(key) + "\n";
    }
  }
  // Timing lines are the only run-to-run variation; comment markers keep the
  // deterministic body easy to compare.
  out += "# wall_ms=" + std::to_string(report.wall_ms) + "\n";
  out += "# execs_per_sec=" + std::to_string(report.execs_per_sec) + "\n";
  return out;
}

std::string render_dataset(const Dataset& dataset) {
  std::string out;
  for (const Record& r : dataset.rows) {
    out += render_value(r);
    out += '\n';
  }
  return out;
}

}  // namespace flowfuzz
