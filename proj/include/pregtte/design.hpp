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

// Time-zero designs. Each design fixes when eligibility is assessed, when
// treatment is assigned and when follow-up starts:
//   4A  LMP with full visibility (simulation-only benchmark)
//   4B  LMP, restricted to pregnancies whose end is observed
//   4C  LMP, prospective from the first pregnancy contact
//   4D  first prenatal visit inside the eligibility window
//   4E  preconception counseling visit

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pregtte/observation.hpp"
#include "pregtte/protocol.hpp"
#include "pregtte/scm.hpp"

namespace pregtte {

enum class Anchor { LmpIdeal, RetroEndOfPregnancy, ProspectiveFirstContact, FirstPrenatalVisit, PreconceptionVisit };
std::string_view to_string(Anchor a);  ///< "4A".."4E"
std::string_view anchor_name(Anchor a);
/// Accepts "4A".."4E" or the long anchor names.
Anchor parse_anchor(std::string_view s);

struct DesignSpec {
  Anchor anchor = Anchor::FirstPrenatalVisit;
  /// Inclusive gestational-week range in which the anchor must fall.
  int window_first_week = 0;
  int window_last_week = 0;
  bool require_outcome_observed = false;
};

/// Default spec for an anchor under a protocol. 4D takes the protocol window,
/// 4E the preconception range, the LMP designs a window of {0}.
DesignSpec design_spec(Anchor anchor, const ProtocolSpec& protocol);

enum class Terminal { Event, Competing, Censored, AdminEnd };
std::string_view to_string(Terminal t);

inline constexpr signed char kClaimUnknown = -1;

struct CohortMember {
  std::uint64_t person_id = 0;
  int t0_week = 0;  ///< gestational week of time zero
  bool treated = false;  ///< assigned to the treated strategy
  bool on_at_anchor = false;
  bool prior_user = false;
  std::map<std::string, double> covariates;  ///< known by t0
  /// Dispensing state per week since t0 over follow-up (1, 0 or kClaimUnknown).
  std::vector<signed char> treatment;
  /// Week since t0 of the terminal row.
  int terminal_week = 0;
  Terminal terminal = Terminal::AdminEnd;
  int immortal_weeks = 0;

  bool operator==(const CohortMember&) const = default;
};

struct PersonWeek {
  std::uint64_t person_id = 0;
  int week_since_t0 = 0;
  bool assigned_treated = false;
  bool on_treatment = false;
  bool at_risk = true;
  bool event = false;
  bool competing_event = false;
  bool censored = false;
};

struct AnalyticCohort {
  DesignSpec design;
  ProtocolSpec protocol;
  std::vector<CohortMember> members;  ///< sorted by person_id
  std::size_t n_screened = 0;
  std::map<std::string, std::size_t> exclusions;  ///< reason -> count

  /// Person-week rows from t0 through each member's terminal row.
  std::vector<PersonWeek> rows() const;
  std::size_t n_excluded() const;
};

/// Anchor week for one record, or nullopt when the record has no anchor in
/// the design window.
std::optional<int> locate_anchor(const ObservedRecord& record, const DesignSpec& design);

/// Builds the analytic cohort. `truth` is required for 4A, where it replaces
/// the observed records with full-visibility projections. Throws
/// PreconditionError when the design window leaves the protocol window or 4A
/// lacks truth.
AnalyticCohort build_cohort(std::span<const ObservedRecord> records, const DesignSpec& design,
                            const ProtocolSpec& protocol, std::span<const Trajectory> truth = {},
                            const ObservationParams& observation = {});

struct ImmortalTime {
  std::map<std::uint64_t, int> per_person;
  long long total = 0;
};
ImmortalTime immortal_time(const AnalyticCohort& cohort);

/// Members in one prior-use stratum (prior_user == value).
AnalyticCohort stratum(const AnalyticCohort& cohort, bool prior_user);

}  // namespace pregtte
