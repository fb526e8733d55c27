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

#include <string>
#include <vector>

namespace flowfuzz {

struct Benchmark {
  std::string name;
  std::string pipeline_path;
  std::string schema_path;
};

/// Shipped benchmark suite: every <name>.dfl under `dir` paired with its
/// sibling <name>.schema, sorted by name. Ships at minimum income_buggy and
/// income_fixed.
std::vector<Benchmark> load_benchmarks(const std::string& dir);

/// Whole-file read; throws std::runtime_error when the file cannot be read.
std::string read_file(const std::string& path);

/// Newline-separated raw rows (the artifact/input file format).
std::vector<std::string> read_lines(const std::string& path);

}  // namespace flowfuzz
