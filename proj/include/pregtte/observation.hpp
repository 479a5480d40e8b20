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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pregtte/scm.hpp"

namespace pregtte {

struct ObservationParams {
  /// Dispensings up to this many weeks before the first pregnancy contact are visible.
  int claims_lookback_weeks = 26;
  /// Correlation of the measured `u_proxy` covariate with U (0 = pure noise).
  double u_proxy_correlation = 0.0;
};

enum class EndType { LiveBirth, Loss };
std::string_view to_string(EndType t);

struct TreatmentClaim {
  int week = 0;
  bool on_treatment = false;
  bool operator==(const TreatmentClaim&) const = default;
};

struct ObservedEnd {
  int week = 0;
  EndType type = EndType::LiveBirth;
  bool operator==(const ObservedEnd&) const = default;
};

/// What a claims database holds for one pregnancy. Never carries U or the
/// susceptibility flag.
struct ObservedRecord {
  std::uint64_t person_id = 0;
  std::vector<Encounter> visible_encounters;
  int first_pregnancy_contact_week = 0;
  std::map<std::string, double> baseline_covariates;
  std::vector<TreatmentClaim> treatment_claims;
  std::optional<ObservedEnd> observed_end;
  std::optional<bool> observed_outcome;

  /// Dispensing indicator for `week`; nullopt outside the visible claim range.
  std::optional<bool> claim_at(int week) const;
  std::optional<int> first_visit_in(EncounterKind kind, int lo, int hi) const;
  double covariate(const std::string& name) const;

  bool operator==(const ObservedRecord&) const = default;
};

inline constexpr const char* kCovChronic = "chronic_condition";
inline constexpr const char* kCovPrepregUser = "prepreg_user";
inline constexpr const char* kCovUProxy = "u_proxy";

bool is_pregnancy_related(EncounterKind k);

/// Claims-visible projection, or nullopt when no pregnancy encounter was recorded.
std::optional<ObservedRecord> observe(const Trajectory& trajectory, const ObservationParams& params);

/// Full-visibility record used by the LMP benchmark design: every encounter is
/// visible, the pregnancy is known from LMP and the end is always observed.
ObservedRecord observe_ideal(const Trajectory& trajectory, const ObservationParams& params);

std::vector<ObservedRecord> observed_cohort(std::span<const Trajectory> trajectories, const ObservationParams& params);

}  // namespace pregtte
