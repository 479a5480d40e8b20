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

// Effect estimation on an analytic cohort: baseline IPW for the
// intention-to-treat analog, clone-censor-weight for per-protocol effects,
// and discrete-time Aalen-Johansen cumulative incidence with loss as a
// competing event.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pregtte/design.hpp"
#include "pregtte/logistic.hpp"
#include "pregtte/protocol.hpp"

namespace pregtte {

inline constexpr double kPositivityEpsilon = 1e-6;

struct IpwResult {
  std::vector<double> weights;  ///< one per cohort member
  std::vector<std::string> covariates;  ///< confounders that entered the model
  std::optional<LogisticFit> fit;  ///< absent when no confounder varies
  std::vector<std::string> warnings;
  double mean_weight = 1.0;
};

/// Baseline propensity weights for assignment to the treated strategy.
IpwResult ipw_weights(const AnalyticCohort& cohort, const std::vector<std::string>& confounders, bool stabilized);

/// Resolves Treat/NoTreat to continue/initiate or discontinue/withhold.
StrategyKind resolve_strategy(StrategyKind kind, bool on_at_anchor);

/// First week since t0 at which observed treatment departs from the
/// strategy. Unknown claim weeks never count as departures.
std::optional<int> deviation_week(const CohortMember& member, StrategyKind kind, int grace_period_weeks);

/// One replicate of one person under one strategy.
struct Clone {
  std::size_t member = 0;  ///< index into cohort.members
  int arm = 0;  ///< 0 = treated strategy, 1 = untreated strategy
  std::optional<int> artificial_censor_week;  ///< set only when it precedes the member's terminal row
  /// Inverse probability of remaining uncensored, per week since t0 up to the
  /// last row. Empty until censor_weights runs.
  std::vector<double> ipc_weight;
};

std::vector<Clone> clone_expand(const AnalyticCohort& cohort);

/// Long-format clone rows (week granularity).
struct CloneRow {
  std::uint64_t person_id = 0;
  std::string replicate_strategy;
  int week_since_t0 = 0;
  bool deviated = false;
  std::optional<int> artificial_censor_week;
  double ipc_weight = 1.0;
  bool event = false;
  bool competing_event = false;
  bool censored = false;
};
std::vector<CloneRow> clone_rows(const AnalyticCohort& cohort, const std::vector<Clone>& clones);

struct CensorWeightOptions {
  std::vector<std::string> covariates = {"treated_at_lmp", "prepreg_user"};
  /// Upper weight quantile used as truncation cap; 1.0 disables truncation.
  double truncation_quantile = 0.99;
};

struct CensorWeightReport {
  std::vector<std::string> notes;
  double truncation_cap = 0.0;
  std::size_t n_truncated = 0;
};

/// Fits the censoring models (per arm: week 0, first week after grace, and
/// a pooled model over the remaining weeks with a linear week term) and fills
/// ipc_weight with cumulative inverse probabilities, truncated at the
/// configured quantile.
CensorWeightReport censor_weights(const AnalyticCohort& cohort, std::vector<Clone>& clones,
                                  const CensorWeightOptions& options = {});

/// Follow-up summary of one unit for cumulative incidence.
struct FollowUpUnit {
  int terminal_week = 0;
  Terminal terminal = Terminal::AdminEnd;
  double weight = 1.0;
};

struct CifCurve {
  std::vector<double> outcome;
  std::vector<double> competing;
  std::vector<double> survival;
  double final_outcome() const { return outcome.empty() ? 0.0 : outcome.back(); }
};

/// Discrete-time Aalen-Johansen estimator. A censored unit is at risk
/// through terminal_week - 1.
CifCurve cuminc_competing(std::span<const FollowUpUnit> units);
CifCurve cuminc_competing(const AnalyticCohort& cohort);

enum class Scale { RiskDifference, RiskRatio };
std::string_view to_string(Scale s);

struct EffectEstimate {
  Contrast estimand = Contrast::IttAnalog;
  Scale scale = Scale::RiskDifference;
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_persons = 0;
  std::size_t n_events = 0;
  std::string method_tag;
  std::optional<double> oracle_truth;
  std::optional<double> bias;

  void set_truth(double truth) {
    oracle_truth = truth;
    bias = point - truth;
  }
};

/// Primary report: cause-specific outcome CIF with loss competing.
/// Sensitivity: loss counted as an outcome event (loss-or-outcome composite).
enum class OutcomeVariant { CauseSpecific, LossOrOutcome };
std::string_view to_string(OutcomeVariant v);

struct EstimationOptions {
  std::optional<Contrast> contrast;  ///< defaults to the protocol's contrast
  int bootstrap = 500;
  std::uint64_t seed = 1;
  double ci_level = 0.95;
  bool stabilized = true;
  double truncation_quantile = 0.99;
  std::optional<std::vector<std::string>> confounders;  ///< defaults to the protocol's list
  OutcomeVariant outcome = OutcomeVariant::CauseSpecific;
};

struct EffectResult {
  std::string label;
  EffectEstimate risk_difference;
  std::optional<EffectEstimate> risk_ratio;  ///< absent when an arm has no events
  bool ratio_undefined = false;
  double risk_treated = 0.0;
  double risk_untreated = 0.0;
  long long immortal_person_weeks = 0;
  int bootstrap_failures = 0;
  std::vector<std::string> notes;
};

/// Risk difference and ratio at the end of follow-up with a percentile
/// bootstrap over persons (both clones of a person travel together).
EffectResult estimate_effect(const AnalyticCohort& cohort, const EstimationOptions& options = {});

/// Exact multinomial(n, sizes / sum) draw by sequential binomials.
std::vector<double> multinomial_counts(std::span<const double> sizes, std::uint64_t key);

/// Type-7 quantile of a sample.
double quantile(std::vector<double> values, double q);

}  // namespace pregtte
