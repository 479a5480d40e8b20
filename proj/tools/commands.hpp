/*
 * Copyright 2026 The pregtte Authors
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

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

namespace pregtte::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitSchema = 4,
  kExitNumerical = 5,
  kExitIo = 6,
};

/// Bad command-line usage detected after parsing (e.g. zero repeats).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulateOptions {
  std::string config;  ///< path, or empty with `preset`
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n_persons;
};

struct IdentifyOptions {
  std::string target;  ///< catalog name or DAG file
  std::vector<std::string> measure;
};

struct EmulateOptions {
  std::string data;
  std::string protocol = "stop_or_go";
  std::string design = "4D";
  std::string contrast = "protocol";
  int bootstrap = 500;
  std::uint64_t seed = 1;
  bool loss_or_outcome = false;
};

struct CompareOptions {
  std::string config;
  std::string preset;
  std::vector<std::string> designs;
  std::optional<int> repeats;
  std::optional<int> bootstrap;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n_persons;
  std::string stratum = "all";  ///< all | prior_user | non_user
};

/// Where outputs go. Without `out` a command prints to stdout and writes nothing.
struct OutputOptions {
  std::string out;
  bool force = false;
  /// Recorded timestamp to reuse (set by `rerun`).
  std::optional<std::string> timestamp;
};

/// Runs the `pregtte` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pregtte::cli
