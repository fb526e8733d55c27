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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flowfuzz/benchmarks.hpp"
#include "flowfuzz/fuzz.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_interrupt(int) { g_stop.store(true, std::memory_order_relaxed); }

/// Parse a pipeline file; on diagnostics prints file:line:col and returns
/// nullopt (callers exit 1).
std::optional<flowfuzz::PipelineSpec> load_pipeline(const std::string& path) {
  auto parsed = flowfuzz::parse_pipeline(flowfuzz::read_file(path));
  if (!parsed.ok()) {
    std::cerr << "error: " << path << ":" << parsed.diagnostic().render() << "\n";
    return std::nullopt;
  }
  return parsed.take_value();
}

std::optional<flowfuzz::Schema> load_schema(const std::string& path) {
  auto parsed = flowfuzz::parse_schema(flowfuzz::read_file(path));
  if (!parsed.ok()) {
    std::cerr << "error: " << path << ":" << parsed.diagnostic().render() << "\n";
    return std::nullopt;
  }
  return parsed.take_value();
}

void print_execution(const flowfuzz::PipelineSpec& spec, const std::vector<std::string>& rows,
                     bool replay_style) {
  flowfuzz::EventSink sink;
  const auto input = flowfuzz::input_from_lines(rows);
  auto result = flowfuzz::exec_pipeline(spec, flowfuzz::dataset_from(input), sink);
  if (replay_style) {
    if (result.ok()) {
      std::cout << "fault: none\n";
    } else {
      std::cout << "fault: " << result.fault().render() << "\n";
    }
  } else {
    std::cout << "output:\n";
    if (result.ok()) {
      std::cout << flowfuzz::render_dataset(result.value());
    } else {
      std::cout << "fault: " << result.fault().render() << "\n";
    }
  }
  std::cout << "coverage:\n" << flowfuzz::render_coverage(flowfuzz::collect(sink.events()));
}

int run_fuzz_command(const std::string& pipeline_path, const std::string& schema_path,
                     const std::string& out_dir, const flowfuzz::FuzzConfig& config,
                     const std::string& seeds_dir, bool no_tty) {
  auto spec = load_pipeline(pipeline_path);
  if (!spec) return 1;
  auto schema = load_schema(schema_path);
  if (!schema) return 1;

  flowfuzz::RunHooks hooks;
  hooks.out_dir = out_dir;
  hooks.stop = &g_stop;
  if (!seeds_dir.empty()) {
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(seeds_dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    for (const std::string& f : files) {
      auto lines = flowfuzz::read_lines(f);
      if (!lines.empty()) hooks.seeds.push_back(flowfuzz::input_from_lines(std::move(lines)));
    }
  }

  // Status line at >= 2 Hz: rewritten in place on a TTY, one line per update
  // otherwise.
  auto last_update = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  hooks.on_progress = [&](const flowfuzz::FuzzProgress& p) {
    const auto now = std::chrono::steady_clock::now();
    if (now - last_update < std::chrono::milliseconds(500)) return;
    last_update = now;
    const uint64_t rate = p.elapsed_ms == 0 ? 0 : p.trials * 1000 / p.elapsed_ms;
    std::fprintf(stderr, "%strials=%llu cov=%zu/%zu crashes=%zu execs/s=%llu%s",
                 no_tty ? "" : "\r", static_cast<unsigned long long>(p.trials), p.covered,
                 p.universe, p.crashes, static_cast<unsigned long long>(rate),
                 no_tty ? "\n" : "   ");
    std::fflush(stderr);
  };

  std::signal(SIGINT, handle_interrupt);
  const flowfuzz::FuzzReport report = flowfuzz::run_fuzz(*spec, *schema, config, hooks);
  std::signal(SIGINT, SIG_DFL);
  if (!no_tty) std::fprintf(stderr, "\n");

  std::cout << flowfuzz::render_report(report);
  return 0;
}

int run_report_command(const std::string& out_dir) {
  const std::string stats_path = (std::filesystem::path(out_dir) / "stats.csv").string();
  const auto lines = flowfuzz::read_lines(stats_path);
  if (lines.size() < 2) {
    std::cout << "trials: 0\n";
    return 0;
  }
  const std::string& last = lines.back().empty() ? lines[lines.size() - 2] : lines.back();
  // stats.csv: trial,covered,crashes,elapsed_ms
  unsigned long long trials = 0;
  unsigned long long covered = 0;
  unsigned long long crashes = 0;
  unsigned long long elapsed = 0;
  if (std::sscanf(last.c_str(), "%llu,%llu,%llu,%llu", &trials, &covered, &crashes, &elapsed) !=
      4) {
    std::cerr << "error: malformed stats line: " << last << "\n";
    return 1;
  }
  std::cout << "trials: " << trials << "\n"
            << "covered: " << covered << "\n"
            << "unique_crashes: " << crashes << "\n"
            << "# wall_ms=" << elapsed << "\n"
            << "# execs_per_sec=" << (elapsed == 0 ? 0 : trials * 1000 / elapsed) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage-guided fuzzer for dataflow pipelines"};
  app.require_subcommand(1);

  // fuzz
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Fuzz a pipeline against a schema");
  std::string pipeline_path;
  std::string schema_path;
  std::string out_dir;
  std::string seeds_dir;
  flowfuzz::FuzzConfig config;
  uint64_t duration_ms = 0;
  std::string mutator = "schema";
  bool no_tty = false;
  fuzz_cmd->add_option("--pipeline", pipeline_path, "Pipeline DSL file")
      ->required()
      ->check(CLI::ExistingFile);
  fuzz_cmd->add_option("--schema", schema_path, "Schema config file")
      ->required()
      ->check(CLI::ExistingFile);
  fuzz_cmd->add_option("--out", out_dir, "Artifact output directory")->required();
  fuzz_cmd->add_option("--max-trials", config.max_trials, "Trial budget");
  fuzz_cmd->add_option("--duration-ms", duration_ms, "Wall-clock budget in milliseconds");
  fuzz_cmd->add_option("--rng-seed", config.rng_seed, "Deterministic RNG seed");
  fuzz_cmd->add_option("--p-generate", config.p_generate, "Fresh-generation probability")
      ->check(CLI::Range(0.0, 1.0));
  fuzz_cmd->add_option("--min-rows", config.min_rows, "Minimum rows per generated input");
  fuzz_cmd->add_option("--max-rows", config.max_rows, "Maximum rows per generated input");
  fuzz_cmd->add_option("--mutator", mutator, "Mutation strategy: schema | bytes")
      ->check(CLI::IsMember({"schema", "bytes"}));
  fuzz_cmd->add_option("--seeds", seeds_dir, "Directory of seed input files")
      ->check(CLI::ExistingDirectory);
  fuzz_cmd->add_flag("--no-tty", no_tty, "Line-per-update status output");

  // run
  auto* run_cmd = app.add_subcommand("run", "Execute a pipeline once on an input file");
  std::string run_pipeline;
  std::string run_input;
  run_cmd->add_option("--pipeline", run_pipeline, "Pipeline DSL file")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--input", run_input, "Input rows file")
      ->required()
      ->check(CLI::ExistingFile);

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Replay a saved artifact");
  std::string replay_pipeline;
  std::string replay_input;
  replay_cmd->add_option("--pipeline", replay_pipeline, "Pipeline DSL file")
      ->required()
      ->check(CLI::ExistingFile);
  replay_cmd->add_option("--input", replay_input, "Saved artifact file")
      ->required()
      ->check(CLI::ExistingFile);

  // report
  auto* report_cmd = app.add_subcommand("report", "Summarize stats.csv from a fuzz run");
  std::string report_dir;
  report_cmd->add_option("--out", report_dir, "Fuzz output directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (fuzz_cmd->parsed()) {
      if (duration_ms > 0) config.max_duration_ms = duration_ms;
      config.mutator = mutator == "bytes" ? flowfuzz::MutatorKind::RandomBytes
                                          : flowfuzz::MutatorKind::SchemaAware;
      return run_fuzz_command(pipeline_path, schema_path, out_dir, config, seeds_dir, no_tty);
    }
    if (run_cmd->parsed()) {
      auto spec = load_pipeline(run_pipeline);
      if (!spec) return 1;
      print_execution(*spec, flowfuzz::read_lines(run_input), /*replay_style=*/false);
      return 0;
    }
    if (replay_cmd->parsed()) {
      auto spec = load_pipeline(replay_pipeline);
      if (!spec) return 1;
      print_execution(*spec, flowfuzz::read_lines(replay_input), /*replay_style=*/true);
      return 0;
    }
    if (report_cmd->parsed()) {
      return run_report_command(report_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
