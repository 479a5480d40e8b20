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

#include <span>
#include <string>
#include <vector>

#include "pregtte/dag.hpp"
#include "pregtte/estimation.hpp"
#include "pregtte/observation.hpp"
#include "pregtte/oracle.hpp"

namespace pregtte {

/// Fixed-layout verdict table, one row per estimand.
std::string format_identify_table(const std::string& graph_name, const std::vector<IdentifiabilityVerdict>& verdicts);
std::string identify_json(const std::string& graph_name, const std::vector<IdentifiabilityVerdict>& verdicts);

/// One row per EffectResult with point estimates, CIs and immortal time.
std::string format_estimates(const std::vector<EffectResult>& results);
std::string estimates_json(const std::vector<EffectResult>& results);

std::string format_bias_table(const BiasTable& table);
std::string bias_json(const BiasTable& table);
/// Long format: one line per (design, repeat) estimate plus summary lines.
std::string bias_long_tsv(const BiasTable& table);

/// Descriptive counts of a simulated dataset.
struct DatasetSummary {
  std::size_t trajectories = 0;
  std::size_t observed = 0;
  std::size_t losses = 0;
  std::size_t observed_losses = 0;
  std::size_t live_births = 0;
  std::size_t outcomes = 0;
  std::size_t treated_a0 = 0;
  std::size_t treated_a1 = 0;
  std::size_t no_prenatal_visit = 0;
  std::size_t first_visit_after_week12 = 0;
  std::size_t preconception_visits = 0;
  std::size_t observed_ends = 0;

  bool operator==(const DatasetSummary&) const = default;
};

DatasetSummary summarize_dataset(std::span<const Trajectory> trajectories, std::span<const ObservedRecord> observed);
std::string format_dataset_summary(const DatasetSummary& s);
std::string dataset_summary_json(const DatasetSummary& s);

/// Fixed six-decimal rendering used by every text table.
std::string fixed6(double x);

}  // namespace pregtte
