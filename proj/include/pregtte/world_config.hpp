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
#include <string>
#include <string_view>
#include <vector>

#include "pregtte/config_text.hpp"
#include "pregtte/observation.hpp"
#include "pregtte/scm.hpp"

namespace pregtte {

/// One experiment: a world, how it is observed, and what to run on it.
/// Loaded from a single `key = value` file (schema in docs/formats.md).
struct ExperimentConfig {
  WorldParams world;
  ObservationParams observation;
  std::string protocol = "stop_or_go";
  std::vector<std::string> designs = {"4B", "4C", "4D"};
  int repeats = 50;
  int bootstrap = 500;
  std::uint64_t oracle_draws = 2'000'000;
  /// Oracle estimand and target population used by `compare`.
  std::string estimand = "DECISION_AT_ANCHOR";
  std::string population = "OBSERVED_AT_ANCHOR";
  /// ITT_ANALOG, PER_PROTOCOL, or `protocol` to use the protocol's contrast.
  std::string contrast = "protocol";
};

/// Parses a world/experiment config. An optional `preset = <name>` line
/// selects the base values that the remaining keys override.
ExperimentConfig parse_experiment(const ConfigText& doc);
ExperimentConfig load_experiment(const std::string& path);
ExperimentConfig experiment_from_preset(std::string_view preset_name);

/// Canonical text (every key, fixed order, round-trip precision). Parsing the
/// canonical text yields an identical config.
std::string canonical_text(const ExperimentConfig& config);
std::string canonical_world_text(const WorldParams& world, const ObservationParams& observation);

/// 64-bit FNV-1a digest rendered as 16 hex digits.
std::string digest_hex(std::string_view bytes);
std::string params_digest(const WorldParams& world, const ObservationParams& observation);

std::string format_real(double x);

}  // namespace pregtte
