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

#include "pregtte/observation.hpp"

#include <algorithm>
#include <cmath>

#include "pregtte/errors.hpp"

namespace pregtte {

std::string_view to_string(EndType t) { return t == EndType::LiveBirth ? "LIVE_BIRTH" : "LOSS"; }

bool is_pregnancy_related(EncounterKind k) { return k != EncounterKind::PreconceptionCounseling; }

std::optional<bool> ObservedRecord::claim_at(int week) const {
  if (treatment_claims.empty()) return std::nullopt;
  const int first = treatment_claims.front().week;
  if (week < first || week > treatment_claims.back().week) return std::nullopt;
  return treatment_claims[static_cast<std::size_t>(week - first)].on_treatment;
}

std::optional<int> ObservedRecord::first_visit_in(EncounterKind kind, int lo, int hi) const {
  for (const auto& e : visible_encounters)
    if (e.kind == kind && e.week >= lo && e.week <= hi) return e.week;
  return std::nullopt;
}

double ObservedRecord::covariate(const std::string& name) const {
  const auto it = baseline_covariates.find(name);
  if (it == baseline_covariates.end()) throw PreconditionError("unknown covariate '" + name + "'");
  return it->second;
}

namespace {

void fill_common(const Trajectory& t, const ObservationParams& params, int claims_from, ObservedRecord& rec) {
  const double rho = params.u_proxy_correlation;
  rec.person_id = t.person_id;
  rec.baseline_covariates[kCovChronic] = t.chronic_condition ? 1.0 : 0.0;
  rec.baseline_covariates[kCovPrepregUser] = t.on_treatment(-1) ? 1.0 : 0.0;
  rec.baseline_covariates[kCovUProxy] = rho * t.u + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * t.proxy_noise;
  for (int w = claims_from; w <= t.end_week; ++w) rec.treatment_claims.push_back({w, t.on_treatment(w)});
}

}  // namespace

std::optional<ObservedRecord> observe(const Trajectory& t, const ObservationParams& params) {
  ObservedRecord rec;
  std::optional<int> first_contact;
  bool end_visible = false;
  for (const auto& e : t.encounters) {
    if (!e.recorded) continue;
    rec.visible_encounters.push_back(e);
    if (is_pregnancy_related(e.kind) && !first_contact) first_contact = e.week;
    if (e.kind == EncounterKind::DeliveryOrEnd) end_visible = true;
  }
  if (!first_contact) return std::nullopt;
  rec.first_pregnancy_contact_week = *first_contact;
  // Dispensings are visible from the lookback before the earliest recorded encounter.
  const int earliest = std::min(*first_contact, rec.visible_encounters.front().week);
  fill_common(t, params, earliest - params.claims_lookback_weeks, rec);
  if (end_visible) {
    rec.observed_end = ObservedEnd{t.end_week, t.lost() ? EndType::Loss : EndType::LiveBirth};
    if (!t.lost()) rec.observed_outcome = t.y;
  }
  return rec;
}

ObservedRecord observe_ideal(const Trajectory& t, const ObservationParams& params) {
  ObservedRecord rec;
  rec.visible_encounters = t.encounters;
  for (auto& e : rec.visible_encounters) e.recorded = true;
  rec.first_pregnancy_contact_week = 0;
  fill_common(t, params, -params.claims_lookback_weeks, rec);
  rec.observed_end = ObservedEnd{t.end_week, t.lost() ? EndType::Loss : EndType::LiveBirth};
  if (!t.lost()) rec.observed_outcome = t.y;
  return rec;
}

std::vector<ObservedRecord> observed_cohort(std::span<const Trajectory> trajectories, const ObservationParams& params) {
  std::vector<ObservedRecord> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    if (auto rec = observe(t, params)) out.push_back(std::move(*rec));
  }
  return out;
}

}  // namespace pregtte
