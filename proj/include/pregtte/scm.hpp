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

// Weekly-resolution structural causal model of a pregnancy: pre-pregnancy
// treatment history, early treatment A0, selection (loss) S, treatment A1
// decided at the first prenatal visit, end-of-pregnancy outcome Y, and the
// healthcare encounters that later determine what a claims database sees.
//
// Gestational weeks count from LMP (week 0). Negative weeks are pre-pregnancy.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pregtte/rng.hpp"

namespace pregtte {

enum class Scenario { Fig3A, Fig3B, Fig3C, PrevalentUser };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

inline constexpr int kRecognitionFirstWeek = 4;
inline constexpr int kRecognitionLastWeek = 20;
inline constexpr std::size_t kRecognitionWeeks = kRecognitionLastWeek - kRecognitionFirstWeek + 1;

struct PrePregnancyParams {
  double p_chronic_condition = 1.0;
  double p_susceptible = 0.0;
  double p_initiate_per_month = 0.0;
  double p_adverse_event_on_initiation = 0.0;
  double p_discontinue_given_adverse = 0.0;
  int months_lookback = 12;
};

struct EncounterParams {
  double p_preconception_visit = 0.2;
  /// Unnormalized weights over gestational weeks 4..20.
  std::array<double, kRecognitionWeeks> recognition_weights{10, 16, 16, 12, 9, 7, 6, 5, 4, 3, 3, 2, 2, 1.5, 1.5, 1, 1};
  double p_late_prenatal_after_week12 = 0.15;
  double p_no_prenatal_care = 0.11;
  int early_visit_first_week = 6;
  int late_visit_last_week = 28;
  int visit_interval_weeks = 4;
  int preconception_earliest_week = -26;
  /// Probability that a loss after the first pregnancy contact is coded.
  double p_loss_recorded = 1.0;
};

/// Every structural coefficient of a simulated world. Log-odds scale unless
/// named as a probability.
struct WorldParams {
  Scenario scenario = Scenario::Fig3A;
  std::uint64_t n_persons = 0;
  std::uint64_t seed = 1;

  double coef_u_on_y = 0.0;
  double coef_u_on_s = 0.0;
  double coef_u_on_a0 = 0.0;
  double coef_u_on_a1 = 0.0;
  double coef_a0_on_a1 = 0.0;
  double coef_a0_on_y = 0.0;
  double coef_a1_on_y = 0.0;
  double coef_a0_on_s = 0.0;

  double intercept_a0 = 0.0;
  double intercept_a1 = 0.0;
  double coef_prepreg_on_a0 = 0.0;
  double coef_susceptible_on_y = 0.0;
  double coef_susceptible_treated_on_y = 0.0;

  double baseline_loss_hazard = 0.0;
  double baseline_outcome_risk = 0.1;
  int loss_window_last_week = 19;
  int term_week_min = 37;
  int term_week_max = 41;
  int a1_default_week = 12;

  /// Weekly probability that someone on treatment after the decision stops.
  double post_decision_stop_hazard = 0.0;
  double coef_a0_on_stop = 0.0;

  PrePregnancyParams prepreg;
  EncounterParams encounters;
};

/// Throws ParameterError on any out-of-domain value.
void validate(const WorldParams& params);

/// Copy with the arrows the scenario forbids set to zero
/// (Fig3A: U->A0, U->A1, A0->S; Fig3B: U->A0, U->A1).
WorldParams with_scenario_constraints(WorldParams params);

/// Named default worlds: null, fig3a, fig3b, fig3c, prevalent_user.
WorldParams preset(std::string_view name);
std::vector<std::string> preset_names();
EncounterParams default_encounter_params();

enum class EncounterKind { PreconceptionCounseling, PregnancyTest, PrenatalVisit, DeliveryOrEnd };
std::string_view to_string(EncounterKind k);
EncounterKind parse_encounter_kind(std::string_view s);

struct Encounter {
  EncounterKind kind = EncounterKind::PrenatalVisit;
  int week = 0;
  /// Whether the encounter happens inside the data source.
  bool recorded = true;

  bool operator==(const Encounter&) const = default;
};

/// Complete ground-truth history of one pregnancy.
struct Trajectory {
  std::uint64_t person_id = 0;
  double u = 0.0;
  double proxy_noise = 0.0;
  bool chronic_condition = false;
  bool susceptible = false;
  bool prepreg_user = false;
  bool prepreg_discontinued = false;
  /// Pre-pregnancy treatment interval [start, stop) in weeks; empty when start == stop.
  int prepreg_start_week = 0;
  int prepreg_stop_week = 0;
  bool a0 = false;
  bool a1 = false;
  int a1_week = 0;
  std::optional<int> stop_week;
  bool in_system = true;
  std::vector<Encounter> encounters;
  std::optional<int> s_event;
  int end_week = 0;
  std::optional<bool> y;

  /// Dispensing coverage in gestational week `week` (ignores end_week).
  bool on_treatment(int week) const;
  bool lost() const { return s_event.has_value(); }
  /// Y=1 and no loss: the outcome cumulative incidence counts only these.
  bool composite_outcome() const { return y.value_or(false); }
  std::optional<int> first_prenatal_visit() const;

  bool operator==(const Trajectory&) const = default;
};

struct PrePregnancyState {
  bool prepreg_user = false;
  bool susceptible = false;
  double u = 0.0;
  bool chronic_condition = false;
  bool discontinued = false;
  int start_week = 0;
  int stop_week = 0;
};

/// Forced treatment values. Unset members follow their structural equation.
struct Intervention {
  std::optional<bool> a0;
  std::optional<bool> a1;
};

/// Per-person substream purposes. Each purpose draws from its own stream, so
/// interventions and encounter parameters leave every other draw untouched.
enum class Purpose : std::uint64_t { Latent = 1, PrePregnancy, TreatA0, Loss, TreatA1, Stop, Term, Outcome, Care, Recognition, Visit, Preconception, LossRecording };

inline Stream person_stream(std::uint64_t seed, std::uint64_t person_id, Purpose purpose) {
  return Stream(seed, person_id, static_cast<std::uint64_t>(purpose));
}

double expit(double x);
double logit(double p);

/// Pre-pregnancy chain (depletion of susceptibles). `rng` supplies the
/// monthly initiation / adverse event / discontinuation draws; `latent`
/// supplies U, susceptibility and the chronic-condition flag.
PrePregnancyState simulate_prepregnancy(const WorldParams& params, Stream& latent, Stream& rng);

/// Weekly loss probability in the early window; 0 outside weeks 1..loss_window_last_week.
double structural_hazard(const WorldParams& params, double u, bool a0, int week);

Trajectory simulate_person(const WorldParams& params, std::uint64_t person_id, const Intervention& intervention = {});

/// Persons 0..n_persons-1, sorted by person_id. Deterministic given the seed.
std::vector<Trajectory> simulate_cohort(const WorldParams& params);

}  // namespace pregtte
