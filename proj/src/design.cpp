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

#include "pregtte/design.hpp"

#include <algorithm>

#include "pregtte/errors.hpp"

namespace pregtte {

std::string_view to_string(Anchor a) {
  switch (a) {
    case Anchor::LmpIdeal: return "4A";
    case Anchor::RetroEndOfPregnancy: return "4B";
    case Anchor::ProspectiveFirstContact: return "4C";
    case Anchor::FirstPrenatalVisit: return "4D";
    case Anchor::PreconceptionVisit: return "4E";
  }
  return "?";
}

std::string_view anchor_name(Anchor a) {
  switch (a) {
    case Anchor::LmpIdeal: return "LMP_IDEAL";
    case Anchor::RetroEndOfPregnancy: return "RETRO_END_OF_PREGNANCY";
    case Anchor::ProspectiveFirstContact: return "PROSPECTIVE_FIRST_CONTACT";
    case Anchor::FirstPrenatalVisit: return "FIRST_PRENATAL_VISIT";
    case Anchor::PreconceptionVisit: return "PRECONCEPTION_VISIT";
  }
  return "?";
}

Anchor parse_anchor(std::string_view s) {
  for (auto a : {Anchor::LmpIdeal, Anchor::RetroEndOfPregnancy, Anchor::ProspectiveFirstContact,
                 Anchor::FirstPrenatalVisit, Anchor::PreconceptionVisit})
    if (to_string(a) == s || anchor_name(a) == s) return a;
  throw PreconditionError("unknown design '" + std::string(s) + "' (4A, 4B, 4C, 4D, 4E)");
}

DesignSpec design_spec(Anchor anchor, const ProtocolSpec& protocol) {
  DesignSpec d;
  d.anchor = anchor;
  switch (anchor) {
    case Anchor::FirstPrenatalVisit:
      d.window_first_week = protocol.window_first_week;
      d.window_last_week = protocol.window_last_week;
      break;
    case Anchor::PreconceptionVisit:
      d.window_first_week = -26;
      d.window_last_week = -1;
      break;
    default:
      d.window_first_week = 0;
      d.window_last_week = 0;
      break;
  }
  d.require_outcome_observed = anchor == Anchor::RetroEndOfPregnancy;
  return d;
}

std::string_view to_string(Terminal t) {
  switch (t) {
    case Terminal::Event: return "event";
    case Terminal::Competing: return "competing";
    case Terminal::Censored: return "censored";
    case Terminal::AdminEnd: return "admin_end";
  }
  return "?";
}

std::size_t AnalyticCohort::n_excluded() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : exclusions) n += count;
  return n;
}

std::vector<PersonWeek> AnalyticCohort::rows() const {
  std::vector<PersonWeek> out;
  for (const auto& m : members) {
    for (int k = 0; k <= m.terminal_week; ++k) {
      PersonWeek r;
      r.person_id = m.person_id;
      r.week_since_t0 = k;
      r.assigned_treated = m.treated;
      r.on_treatment = m.treatment[static_cast<std::size_t>(k)] == 1;
      if (k == m.terminal_week) {
        r.event = m.terminal == Terminal::Event;
        r.competing_event = m.terminal == Terminal::Competing;
        r.censored = m.terminal == Terminal::Censored;
        r.at_risk = !r.censored;
      }
      out.push_back(r);
    }
  }
  return out;
}

std::optional<int> locate_anchor(const ObservedRecord& record, const DesignSpec& design) {
  switch (design.anchor) {
    case Anchor::LmpIdeal:
    case Anchor::ProspectiveFirstContact:
      return 0;
    case Anchor::RetroEndOfPregnancy:
      if (!record.observed_end) return std::nullopt;
      return 0;
    case Anchor::FirstPrenatalVisit:
      return record.first_visit_in(EncounterKind::PrenatalVisit, design.window_first_week, design.window_last_week);
    case Anchor::PreconceptionVisit:
      return record.first_visit_in(EncounterKind::PreconceptionCounseling, design.window_first_week,
                                   design.window_last_week);
  }
  return std::nullopt;
}

namespace {

bool lmp_design(Anchor a) {
  return a == Anchor::LmpIdeal || a == Anchor::RetroEndOfPregnancy || a == Anchor::ProspectiveFirstContact;
}

std::optional<CohortMember> enroll(const ObservedRecord& rec, const DesignSpec& design, const ProtocolSpec& protocol,
                                   std::map<std::string, std::size_t>& exclusions) {
  const auto anchor = locate_anchor(rec, design);
  if (!anchor) {
    ++exclusions[design.require_outcome_observed ? "end_not_observed" : "no_anchor_in_window"];
    return std::nullopt;
  }
  if (protocol.has_rule(EligibilityRule::ChronicCondition) && rec.covariate(kCovChronic) != 1.0) {
    ++exclusions["no_chronic_condition"];
    return std::nullopt;
  }
  if (!lmp_design(design.anchor) && protocol.has_rule(EligibilityRule::CurrentUse) &&
      !rec.claim_at(*anchor - 1).value_or(false)) {
    ++exclusions["not_current_user"];
    return std::nullopt;
  }

  CohortMember m;
  m.person_id = rec.person_id;
  m.t0_week = *anchor;
  m.on_at_anchor = rec.claim_at(*anchor).value_or(false);
  m.treated = design.anchor == Anchor::FirstPrenatalVisit ? m.on_at_anchor : rec.claim_at(0).value_or(false);
  m.prior_user = rec.covariate(kCovPrepregUser) == 1.0;
  m.covariates[kCovPrepregUser] = rec.covariate(kCovPrepregUser);
  m.covariates[kCovChronic] = rec.covariate(kCovChronic);
  m.covariates[kCovUProxy] = rec.covariate(kCovUProxy);
  // Treatment at LMP is baseline information only when t0 lies after LMP.
  if (*anchor > 0) m.covariates["treated_at_lmp"] = rec.claim_at(0).value_or(false) ? 1.0 : 0.0;

  int terminal_gw = 0;
  if (rec.observed_end) {
    terminal_gw = rec.observed_end->week;
    if (rec.observed_end->type == EndType::LiveBirth) {
      if (rec.observed_outcome.value_or(false)) {
        m.terminal = Terminal::Event;
      } else {
        m.terminal = Terminal::AdminEnd;
        terminal_gw += protocol.followup_horizon_weeks;
      }
    } else {
      m.terminal = protocol.competing_event == "none" ? Terminal::Censored : Terminal::Competing;
    }
  } else {
    int last_contact = rec.first_pregnancy_contact_week;
    for (const auto& e : rec.visible_encounters)
      if (is_pregnancy_related(e.kind)) last_contact = std::max(last_contact, e.week);
    m.terminal = Terminal::Censored;
    terminal_gw = last_contact + protocol.ltfu_gap_weeks();
  }
  m.terminal_week = std::max(0, terminal_gw - m.t0_week);
  m.treatment.resize(static_cast<std::size_t>(m.terminal_week) + 1);
  for (int k = 0; k <= m.terminal_week; ++k) {
    const auto c = rec.claim_at(m.t0_week + k);
    m.treatment[static_cast<std::size_t>(k)] = c ? static_cast<signed char>(*c) : kClaimUnknown;
  }
  if (design.anchor == Anchor::RetroEndOfPregnancy || design.anchor == Anchor::ProspectiveFirstContact)
    m.immortal_weeks = std::max(0, rec.first_pregnancy_contact_week - m.t0_week);
  return m;
}

}  // namespace

AnalyticCohort build_cohort(std::span<const ObservedRecord> records, const DesignSpec& design,
                            const ProtocolSpec& protocol, std::span<const Trajectory> truth,
                            const ObservationParams& observation) {
  if (design.window_first_week > design.window_last_week) throw PreconditionError("design window is empty");
  if (design.anchor == Anchor::FirstPrenatalVisit &&
      (design.window_first_week < protocol.window_first_week || design.window_last_week > protocol.window_last_week))
    throw PreconditionError("design window " + std::to_string(design.window_first_week) + ".." +
                            std::to_string(design.window_last_week) + " lies outside protocol window " +
                            std::to_string(protocol.window_first_week) + ".." +
                            std::to_string(protocol.window_last_week));
  if (design.anchor == Anchor::LmpIdeal && truth.empty())
    throw PreconditionError("design 4A needs ground-truth trajectories");

  AnalyticCohort cohort;
  cohort.design = design;
  cohort.protocol = protocol;
  auto add = [&](const ObservedRecord& rec) {
    ++cohort.n_screened;
    if (auto m = enroll(rec, design, protocol, cohort.exclusions)) cohort.members.push_back(std::move(*m));
  };
  if (design.anchor == Anchor::LmpIdeal) {
    for (const auto& t : truth) add(observe_ideal(t, observation));
  } else {
    for (const auto& r : records) add(r);
  }
  std::sort(cohort.members.begin(), cohort.members.end(),
            [](const auto& a, const auto& b) { return a.person_id < b.person_id; });
  return cohort;
}

ImmortalTime immortal_time(const AnalyticCohort& cohort) {
  ImmortalTime out;
  for (const auto& m : cohort.members) {
    out.per_person[m.person_id] = m.immortal_weeks;
    out.total += m.immortal_weeks;
  }
  return out;
}

AnalyticCohort stratum(const AnalyticCohort& cohort, bool prior_user) {
  AnalyticCohort out;
  out.design = cohort.design;
  out.protocol = cohort.protocol;
  out.n_screened = cohort.n_screened;
  out.exclusions = cohort.exclusions;
  for (const auto& m : cohort.members)
    if (m.prior_user == prior_user) out.members.push_back(m);
  return out;
}

}  // namespace pregtte
