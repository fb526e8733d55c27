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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "flowfuzz/benchmarks.hpp"

namespace flowfuzz {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

/// Run the built CLI through the shell, capturing stdout; stderr carries the
/// status line and is dropped.
CliResult run_cli(const std::string& args) {
  const std::string command = std::string(CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.out.append(buf, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

const std::string kBench = std::string(BENCH_DIR);
const std::string kFixtures = std::string(FIXTURES_DIR);

TEST_CASE("fuzz subcommand populates the output directory and exits zero") {
  const fs::path out = fs::temp_directory_path() / "flowfuzz_cli_fuzz";
  fs::remove_all(out);
  const CliResult r = run_cli("fuzz --pipeline " + kBench + "/income_buggy.dfl --schema " +
                              kBench + "/income_buggy.schema --max-trials 10000 --rng-seed 1" +
                              " --out " + out.string() + " --no-tty");
  CHECK(r.exit_code == 0);  // crashing trials are findings, not CLI errors
  CHECK(r.out.find("pipeline: income_buggy\n") != std::string::npos);
  CHECK(r.out.find("covered: 17\n") != std::string::npos);
  CHECK(fs::exists(out / "report.txt"));
  CHECK(fs::exists(out / "stats.csv"));
  CHECK(fs::exists(out / "corpus" / "0001.csv"));
  CHECK(fs::exists(out / "crashes" / "0001.csv"));

  SUBCASE("replay of a saved crash artifact prints the fault and exits zero") {
    const CliResult replay = run_cli("replay --pipeline " + kBench + "/income_buggy.dfl" +
                                     " --input " + (out / "crashes" / "0001.csv").string());
    CHECK(replay.exit_code == 0);
    CHECK(replay.out.find("fault: ParseFailure udf=1 node=8") != std::string::npos);
    CHECK(replay.out.find("coverage:\n") != std::string::npos);
  }
  SUBCASE("report subcommand summarizes stats.csv") {
    const CliResult report = run_cli("report --out " + out.string());
    CHECK(report.exit_code == 0);
    CHECK(report.out.find("trials: 10000\n") != std::string::npos);
    CHECK(report.out.find("covered: 17\n") != std::string::npos);
    CHECK(report.out.find("# execs_per_sec=") != std::string::npos);
  }
}

TEST_CASE("run subcommand prints the sink dataset and coverage") {
  const CliResult r = run_cli("run --pipeline " + kBench + "/income_buggy.dfl --input " +
                              kFixtures + "/one_row.csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("output:\n(\"(>65)\",10900)\n") != std::string::npos);
  CHECK(r.out.find("dataflow op=2 arm=1\n") != std::string::npos);  // filter passed
}

TEST_CASE("run and replay print identical coverage blocks") {
  const std::string tail = " --pipeline " + kBench + "/income_buggy.dfl --input " + kFixtures +
                           "/one_row.csv";
  const CliResult run_result = run_cli("run" + tail);
  const CliResult replay_result = run_cli("replay" + tail);
  REQUIRE(run_result.exit_code == 0);
  REQUIRE(replay_result.exit_code == 0);
  const size_t run_cov = run_result.out.find("coverage:\n");
  const size_t replay_cov = replay_result.out.find("coverage:\n");
  REQUIRE(run_cov != std::string::npos);
  REQUIRE(replay_cov != std::string::npos);
  CHECK(run_result.out.substr(run_cov) == replay_result.out.substr(replay_cov));
}

TEST_CASE("buggy and fixed pipelines disagree on the witness row") {
  const std::string witness = " --input " + kFixtures + "/one_row.csv";
  const CliResult buggy =
      run_cli("run --pipeline " + kBench + "/income_buggy.dfl" + witness);
  const CliResult fixed =
      run_cli("run --pipeline " + kBench + "/income_fixed.dfl" + witness);
  CHECK(buggy.out.find("(\"(>65)\",10900)") != std::string::npos);
  CHECK(fixed.out.find("(\"(20-65)\",10900)") != std::string::npos);
}

TEST_CASE("the fixed pipeline rejects the crash row without crashing") {
  const CliResult fixed = run_cli("run --pipeline " + kBench + "/income_fixed.dfl --input " +
                                  kFixtures + "/crash_row.csv");
  CHECK(fixed.exit_code == 0);
  CHECK(fixed.out.find("fault") == std::string::npos);
  CHECK(fixed.out.find("output:\n") != std::string::npos);
  // The guarded row was mapped to the sentinel and dropped by the filter.
  CHECK(fixed.out.find("dataflow op=2 arm=0\n") != std::string::npos);

  const CliResult buggy = run_cli("run --pipeline " + kBench + "/income_buggy.dfl --input " +
                                  kFixtures + "/crash_row.csv");
  CHECK(buggy.exit_code == 0);
  CHECK(buggy.out.find("fault: ParseFailure udf=1 node=8") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("fuzz --pipeline missing.dfl").exit_code == 2);  // required flags absent
  CHECK(run_cli("frob").exit_code == 2);
}

TEST_CASE("parse diagnostics exit 1 with a position") {
  const fs::path bad = fs::temp_directory_path() / "flowfuzz_bad.dfl";
  std::ofstream(bad) << "pipeline p\nsource s : text\nds2 = distinct(ds9)\nsink ds2\n";
  const CliResult r = run_cli("run --pipeline " + bad.string() + " --input " + kFixtures +
                              "/one_row.csv");
  CHECK(r.exit_code == 1);
  fs::remove(bad);
}

TEST_CASE("help exits zero") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("fuzz --help").exit_code == 0);
}

TEST_CASE("SIGINT finalizes the report and flushes artifacts before exit") {
  const fs::path out = fs::temp_directory_path() / "flowfuzz_cli_sigint";
  fs::remove_all(out);
  // A trial budget far beyond the 2-second window; the interrupt is the only
  // way this run ends.
  const std::string command = "timeout --preserve-status --signal=INT --kill-after=10 2 " +
                              std::string(CLI_PATH) + " fuzz --pipeline " + kBench +
                              "/income_buggy.dfl --schema " + kBench +
                              "/income_buggy.schema --max-trials 1000000000 --out " +
                              out.string() + " --no-tty >/dev/null 2>/dev/null";
  const int status = std::system(command.c_str());
  const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  CHECK(exit_code == 0);  // interrupted, not killed
  CHECK(fs::exists(out / "report.txt"));
  CHECK(fs::exists(out / "stats.csv"));
  const std::string report = read_file((out / "report.txt").string());
  CHECK(report.find("pipeline: income_buggy\n") != std::string::npos);
}

TEST_CASE("every README command example runs with the documented exit code") {
  // Extract the CLI invocations from README.md and execute them in order,
  // from the repository root, with the binary path swapped for the built
  // target. All documented examples exit 0.
  const std::string readme = read_file(std::string(SOURCE_DIR) + "/README.md");
  const std::string prefix = "./build/tools/flowfuzz ";
  std::vector<std::string> commands;
  size_t pos = 0;
  while ((pos = readme.find(prefix, pos)) != std::string::npos) {
    const size_t end = readme.find('\n', pos);
    commands.push_back(readme.substr(pos + prefix.size(), end - pos - prefix.size()));
    pos = end;
  }
  REQUIRE(commands.size() >= 4);  // fuzz, run, replay, report at minimum
  fs::remove_all("/tmp/flowfuzz-demo");
  for (const std::string& args : commands) {
    const std::string command = "cd " + std::string(SOURCE_DIR) + " && " +
                                std::string(CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (fread(buf, 1, sizeof(buf), pipe) > 0) {
    }
    const int status = pclose(pipe);
    const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    CHECK_MESSAGE(exit_code == 0, args);
  }
}

}  // namespace
}  // namespace flowfuzz
