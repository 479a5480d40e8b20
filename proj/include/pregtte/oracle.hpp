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

// Ground truth by direct intervention on the structural model.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pregtte/design.hpp"
#include "pregtte/estimation.hpp"
#include "pregtte/observation.hpp"
#include "pregtte/protocol.hpp"
#include "pregtte/scm.hpp"

namespace pregtte {

enum class OracleKind { Early, Late, Joint, DecisionAtAnchor };
enum class TargetPopulation { AllConceptions, SurvivorsToAnchor, ObservedAtAnchor };
std::string_view to_string(OracleKind k);
std::string_view to_string(TargetPopulation p);
OracleKind parse_oracle_kind(std::string_view s);
TargetPopulation parse_target_population(std::string_view s);

struct OracleEstimand {
  OracleKind kind = OracleKind::Early;
  /// ALL_CONCEPTIONS: every pregnancy. SURVIVORS_TO_ANCHOR: not lost before
  /// the A1 decision week. OBSERVED_AT_ANCHOR: enrolled by the 4D design
  /// under `protocol`. Membership always comes from the natural course.
  TargetPopulation population = TargetPopulation::AllConceptions;
  bool treated_value = true;
  bool untreated_value = false;
  std::uint64_t mc_draws = 2'000'000;
  /// When set, a pilot run predicts the draws needed for this standard error
  /// and the call refuses if mc_draws falls short.
  std::optional<double> max_se;
  ProtocolSpec protocol;
  ObservationParams observation;
  /// Restrict OBSERVED_AT_ANCHOR to one prior-use stratum.
  std::optional<bool> prior_user_stratum;
};

struct OracleResult {
  double truth = 0.0;
  double mc_se = 0.0;
  double risk_treated = 0.0;
  double risk_untreated = 0.0;
  std::uint64_t draws = 0;
  std::uint64_t population_size = 0;
};

/// Risk difference of the composite outcome (Y=1 and no loss) under the two
/// interventions, with common random numbers across arms. Throws
/// PreconditionError for DECISION_AT_ANCHOR over ALL_CONCEPTIONS and when
/// max_se is unreachable with mc_draws.
OracleResult oracle_effect(const WorldParams& params, const OracleEstimand& estimand);

/// Membership of one natural-course trajectory in the target population.
bool in_target_population(const Trajectory& natural, const OracleEstimand& estimand);

struct BiasOptions {
  int repeats = 50;
  int bootstrap = 0;
  std::optional<Contrast> contrast;
  /// Analyze one prior-use stratum only.
  std::optional<bool> stratum;
  double truncation_quantile = 0.99;
};

struct BiasRow {
  std::string design;
  int repeats = 0;
  double mean_estimate = 0.0;
  double empirical_se = 0.0;  ///< standard deviation across repeats
  double bias = 0.0;
  double mean_immortal_weeks = 0.0;  ///< per cohort, summed over persons
  double mean_cohort_size = 0.0;
  std::optional<double> coverage;  ///< share of bootstrap CIs covering the truth
  std::vector<double> estimates;
};

struct BiasTable {
  OracleEstimand estimand;
  OracleResult truth;
  std::vector<BiasRow> rows;
};

/// Runs simulate, observe, build and estimate `options.repeats` times per
/// design against one oracle truth. Repeat r simulates with seed
/// derive_key(params.seed, r); all designs share each repeat's data.
BiasTable bias_table(const WorldParams& params, const std::vector<Anchor>& designs, const ProtocolSpec& protocol,
                     const OracleEstimand& estimand, const BiasOptions& options);
/// Same, with a precomputed truth.
BiasTable bias_table(const WorldParams& params, const std::vector<Anchor>& designs, const ProtocolSpec& protocol,
                     const OracleEstimand& estimand, const OracleResult& truth, const BiasOptions& options);

/// Seed of the oracle's draws (disjoint from the data seeds).
std::uint64_t oracle_seed(std::uint64_t seed);
std::uint64_t repeat_seed(std::uint64_t seed, int repeat);

}  // namespace pregtte
