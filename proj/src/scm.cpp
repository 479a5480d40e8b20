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

#include "pregtte/scm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "pregtte/errors.hpp"

namespace pregtte {

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(std::string(name) + " must be a probability in [0,1], got " + std::to_string(p));
  }
}

void check_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw ParameterError(std::string(name) + " must be finite");
}

int draw_recognition_week(const EncounterParams& enc, Stream& rng) {
  const double total = std::accumulate(enc.recognition_weights.begin(), enc.recognition_weights.end(), 0.0);
  const double target = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < kRecognitionWeeks; ++i) {
    cum += enc.recognition_weights[i];
    if (target < cum) return kRecognitionFirstWeek + static_cast<int>(i);
  }
  return kRecognitionLastWeek;
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Fig3A: return "FIG3A";
    case Scenario::Fig3B: return "FIG3B";
    case Scenario::Fig3C: return "FIG3C";
    case Scenario::PrevalentUser: return "PREVALENT_USER";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "FIG3A") return Scenario::Fig3A;
  if (name == "FIG3B") return Scenario::Fig3B;
  if (name == "FIG3C") return Scenario::Fig3C;
  if (name == "PREVALENT_USER") return Scenario::PrevalentUser;
  throw ParameterError("unknown scenario '" + std::string(name) + "' (FIG3A, FIG3B, FIG3C, PREVALENT_USER)");
}

std::string_view to_string(EncounterKind k) {
  switch (k) {
    case EncounterKind::PreconceptionCounseling: return "PRECONCEPTION_COUNSELING";
    case EncounterKind::PregnancyTest: return "PREGNANCY_TEST";
    case EncounterKind::PrenatalVisit: return "PRENATAL_VISIT";
    case EncounterKind::DeliveryOrEnd: return "DELIVERY_OR_END";
  }
  return "?";
}

EncounterKind parse_encounter_kind(std::string_view s) {
  if (s == "PRECONCEPTION_COUNSELING") return EncounterKind::PreconceptionCounseling;
  if (s == "PREGNANCY_TEST") return EncounterKind::PregnancyTest;
  if (s == "PRENATAL_VISIT") return EncounterKind::PrenatalVisit;
  if (s == "DELIVERY_OR_END") return EncounterKind::DeliveryOrEnd;
  throw ParameterError("unknown encounter kind '" + std::string(s) + "'");
}

double expit(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(p / (1.0 - p));
}

void validate(const WorldParams& p) {
  check_probability(p.baseline_loss_hazard, "baseline_loss_hazard");
  check_probability(p.baseline_outcome_risk, "baseline_outcome_risk");
  check_probability(p.post_decision_stop_hazard, "post_decision_stop_hazard");
  for (auto [x, name] : {std::pair{p.coef_u_on_y, "coef_u_on_y"}, {p.coef_u_on_s, "coef_u_on_s"},
                         {p.coef_u_on_a0, "coef_u_on_a0"}, {p.coef_u_on_a1, "coef_u_on_a1"},
                         {p.coef_a0_on_a1, "coef_a0_on_a1"}, {p.coef_a0_on_y, "coef_a0_on_y"},
                         {p.coef_a1_on_y, "coef_a1_on_y"}, {p.coef_a0_on_s, "coef_a0_on_s"},
                         {p.intercept_a0, "intercept_a0"}, {p.intercept_a1, "intercept_a1"},
                         {p.coef_prepreg_on_a0, "coef_prepreg_on_a0"},
                         {p.coef_susceptible_on_y, "coef_susceptible_on_y"},
                         {p.coef_susceptible_treated_on_y, "coef_susceptible_treated_on_y"},
                         {p.coef_a0_on_stop, "coef_a0_on_stop"}}) {
    check_finite(x, name);
  }
  if (p.loss_window_last_week < 1) throw ParameterError("loss_window_last_week must be >= 1");
  if (p.term_week_min > p.term_week_max) throw ParameterError("term_week_min must not exceed term_week_max");
  if (p.term_week_min <= p.loss_window_last_week)
    throw ParameterError("term_week_min must fall after the loss window");
  if (p.a1_default_week < 1) throw ParameterError("a1_default_week must be >= 1");

  const auto& pp = p.prepreg;
  check_probability(pp.p_chronic_condition, "prepreg.p_chronic_condition");
  check_probability(pp.p_susceptible, "prepreg.p_susceptible");
  check_probability(pp.p_initiate_per_month, "prepreg.p_initiate_per_month");
  check_probability(pp.p_adverse_event_on_initiation, "prepreg.p_adverse_event_on_initiation");
  check_probability(pp.p_discontinue_given_adverse, "prepreg.p_discontinue_given_adverse");
  if (pp.months_lookback < 1) throw ParameterError("prepreg.months_lookback must be >= 1");

  const auto& e = p.encounters;
  check_probability(e.p_preconception_visit, "encounters.p_preconception_visit");
  check_probability(e.p_late_prenatal_after_week12, "encounters.p_late_prenatal_after_week12");
  check_probability(e.p_no_prenatal_care, "encounters.p_no_prenatal_care");
  check_probability(e.p_loss_recorded, "encounters.p_loss_recorded");
  if (e.p_late_prenatal_after_week12 + e.p_no_prenatal_care > 1.0 + 1e-12)
    throw ParameterError("encounters.p_late_prenatal_after_week12 + encounters.p_no_prenatal_care must not exceed 1");
  double total = 0.0;
  for (double w : e.recognition_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("encounters.recognition_weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) throw ParameterError("encounters.recognition_weights must have positive mass");
  if (e.early_visit_first_week < kRecognitionFirstWeek || e.early_visit_first_week > 12)
    throw ParameterError("encounters.early_visit_first_week must lie in 4..12");
  if (e.late_visit_last_week < 13 || e.late_visit_last_week >= p.term_week_min)
    throw ParameterError("encounters.late_visit_last_week must lie in 13..term_week_min-1");
  if (e.visit_interval_weeks < 1) throw ParameterError("encounters.visit_interval_weeks must be >= 1");
  if (e.preconception_earliest_week > -2) throw ParameterError("encounters.preconception_earliest_week must be <= -2");
}

WorldParams with_scenario_constraints(WorldParams p) {
  switch (p.scenario) {
    case Scenario::Fig3A:
      p.coef_a0_on_s = 0.0;
      [[fallthrough]];
    case Scenario::Fig3B:
      p.coef_u_on_a0 = 0.0;
      p.coef_u_on_a1 = 0.0;
      break;
    case Scenario::Fig3C:
    case Scenario::PrevalentUser:
      break;
  }
  return p;
}

EncounterParams default_encounter_params() {
  return EncounterParams{};
}

std::vector<std::string> preset_names() { return {"null", "fig3a", "fig3b", "fig3c", "prevalent_user"}; }

WorldParams preset(std::string_view name) {
  WorldParams p;
  p.encounters = default_encounter_params();
  p.n_persons = 50000;
  p.seed = 1;
  p.baseline_loss_hazard = 0.015;
  p.baseline_outcome_risk = 0.10;
  if (name == "null") {
    p.scenario = Scenario::Fig3A;
    return p;
  }
  if (name == "fig3a" || name == "fig3b" || name == "fig3c") {
    p.scenario = name == "fig3a" ? Scenario::Fig3A : name == "fig3b" ? Scenario::Fig3B : Scenario::Fig3C;
    p.coef_u_on_y = 1.0;
    p.coef_u_on_s = 0.8;
    p.coef_a0_on_a1 = 2.0;
    p.coef_a0_on_y = 0.4;
    p.coef_a1_on_y = 0.4;
    p.intercept_a1 = -1.0;
    if (name != "fig3a") p.coef_a0_on_s = 1.5;
    if (name == "fig3c") {
      p.coef_u_on_a0 = 0.8;
      p.coef_u_on_a1 = 0.8;
    }
    return p;
  }
  if (name == "prevalent_user") {
    p.scenario = Scenario::PrevalentUser;
    p.prepreg = {.p_chronic_condition = 1.0,
                 .p_susceptible = 0.3,
                 .p_initiate_per_month = 0.08,
                 .p_adverse_event_on_initiation = 0.8,
                 .p_discontinue_given_adverse = 0.9,
                 .months_lookback = 12};
    p.intercept_a0 = -2.0;
    p.coef_prepreg_on_a0 = 4.0;
    p.intercept_a1 = -1.0;
    p.coef_a0_on_a1 = 2.5;
    p.coef_a1_on_y = 0.2;
    p.coef_susceptible_on_y = 0.7;
    p.coef_susceptible_treated_on_y = 1.2;
    p.coef_u_on_y = 0.5;
    p.coef_u_on_s = 0.5;
    p.baseline_outcome_risk = 0.08;
    return p;
  }
  throw ParameterError("unknown preset '" + std::string(name) + "'");
}

bool Trajectory::on_treatment(int week) const {
  if (week < 0) return prepreg_start_week <= week && week < prepreg_stop_week;
  if (week < a1_week) return a0;
  return a1 && (!stop_week || week < *stop_week);
}

std::optional<int> Trajectory::first_prenatal_visit() const {
  for (const auto& e : encounters)
    if (e.kind == EncounterKind::PrenatalVisit) return e.week;
  return std::nullopt;
}

PrePregnancyState simulate_prepregnancy(const WorldParams& params, Stream& latent, Stream& rng) {
  const auto& pp = params.prepreg;
  PrePregnancyState st;
  st.u = latent.normal();
  st.chronic_condition = latent.bernoulli(pp.p_chronic_condition);
  st.susceptible = latent.bernoulli(pp.p_susceptible);
  if (params.scenario != Scenario::PrevalentUser || !st.chronic_condition) return st;

  constexpr double kWeeksPerMonth = 52.0 / 12.0;
  for (int m = 0; m < pp.months_lookback; ++m) {
    if (!rng.bernoulli(pp.p_initiate_per_month)) continue;
    st.start_week = -static_cast<int>(std::lround((pp.months_lookback - m) * kWeeksPerMonth));
    st.stop_week = 0;
    if (st.susceptible && rng.bernoulli(pp.p_adverse_event_on_initiation) &&
        rng.bernoulli(pp.p_discontinue_given_adverse)) {
      st.discontinued = true;
      st.stop_week = std::min(st.start_week + 2, -1);
    }
    break;
  }
  st.prepreg_user = st.start_week < 0 && !st.discontinued;
  return st;
}

double structural_hazard(const WorldParams& params, double u, bool a0, int week) {
  if (week < 1 || week > params.loss_window_last_week) return 0.0;
  if (params.baseline_loss_hazard <= 0.0) return 0.0;
  const double lp = logit(params.baseline_loss_hazard) + params.coef_u_on_s * u + params.coef_a0_on_s * (a0 ? 1.0 : 0.0);
  return expit(lp);
}

Trajectory simulate_person(const WorldParams& raw, std::uint64_t person_id, const Intervention& intervention) {
  const WorldParams params = with_scenario_constraints(raw);
  const auto& enc = params.encounters;
  const auto seed = params.seed;
  Trajectory t;
  t.person_id = person_id;

  auto latent = person_stream(seed, person_id, Purpose::Latent);
  auto prepreg_rng = person_stream(seed, person_id, Purpose::PrePregnancy);
  const auto pre = simulate_prepregnancy(params, latent, prepreg_rng);
  t.u = pre.u;
  t.proxy_noise = latent.normal();
  t.chronic_condition = pre.chronic_condition;
  t.susceptible = pre.susceptible;
  t.prepreg_user = pre.prepreg_user;
  t.prepreg_discontinued = pre.discontinued;
  t.prepreg_start_week = pre.start_week;
  t.prepreg_stop_week = pre.stop_week;

  // Care pathway, drawn before biology because A1 is decided at the first prenatal visit.
  auto care = person_stream(seed, person_id, Purpose::Care);
  const double c = care.uniform();
  std::optional<int> visit;
  auto visit_rng = person_stream(seed, person_id, Purpose::Visit);
  if (c < enc.p_no_prenatal_care) {
    t.in_system = false;
  } else if (c < enc.p_no_prenatal_care + enc.p_late_prenatal_after_week12) {
    visit = visit_rng.uniform_int(13, enc.late_visit_last_week);
  } else {
    visit = visit_rng.uniform_int(enc.early_visit_first_week, 12);
  }
  auto recog_rng = person_stream(seed, person_id, Purpose::Recognition);
  int recognition = draw_recognition_week(enc, recog_rng);
  if (visit) recognition = std::min(recognition, *visit);
  t.a1_week = visit.value_or(params.a1_default_week);

  auto a0_rng = person_stream(seed, person_id, Purpose::TreatA0);
  const double a0_draw = a0_rng.uniform();
  if (intervention.a0) {
    t.a0 = *intervention.a0;
  } else if (t.chronic_condition) {
    const double lp = params.intercept_a0 + params.coef_u_on_a0 * t.u + params.coef_prepreg_on_a0 * (t.prepreg_user ? 1.0 : 0.0);
    t.a0 = a0_draw < expit(lp);
  }

  auto loss_rng = person_stream(seed, person_id, Purpose::Loss);
  for (int w = 1; w <= params.loss_window_last_week; ++w) {
    if (loss_rng.uniform() < structural_hazard(params, t.u, t.a0, w)) {
      t.s_event = w;
      break;
    }
  }

  auto a1_rng = person_stream(seed, person_id, Purpose::TreatA1);
  const double a1_draw = a1_rng.uniform();
  if (intervention.a1) {
    t.a1 = *intervention.a1;
  } else if (t.chronic_condition) {
    const double lp = params.intercept_a1 + params.coef_a0_on_a1 * (t.a0 ? 1.0 : 0.0) + params.coef_u_on_a1 * t.u;
    t.a1 = a1_draw < expit(lp);
  }

  auto term_rng = person_stream(seed, person_id, Purpose::Term);
  const int term = term_rng.uniform_int(params.term_week_min, params.term_week_max);
  t.end_week = t.s_event.value_or(term);

  if (t.a1 && params.post_decision_stop_hazard > 0.0) {
    auto stop_rng = person_stream(seed, person_id, Purpose::Stop);
    const double h = expit(logit(params.post_decision_stop_hazard) + params.coef_a0_on_stop * (t.a0 ? 1.0 : 0.0));
    for (int w = t.a1_week + 1; w < t.end_week; ++w) {
      if (stop_rng.uniform() < h) {
        t.stop_week = w;
        break;
      }
    }
  }

  auto y_rng = person_stream(seed, person_id, Purpose::Outcome);
  const double y_draw = y_rng.uniform();
  if (!t.s_event) {
    const double a0 = t.a0 ? 1.0 : 0.0;
    const double a1 = t.a1 ? 1.0 : 0.0;
    const double susc = t.susceptible ? 1.0 : 0.0;
    const double lp = logit(params.baseline_outcome_risk) + params.coef_a0_on_y * a0 + params.coef_a1_on_y * a1 +
                      params.coef_u_on_y * t.u + params.coef_susceptible_on_y * susc +
                      params.coef_susceptible_treated_on_y * susc * a1;
    t.y = y_draw < expit(lp);
  }

  auto pre_rng = person_stream(seed, person_id, Purpose::Preconception);
  if (pre_rng.bernoulli(enc.p_preconception_visit)) {
    t.encounters.push_back({EncounterKind::PreconceptionCounseling, pre_rng.uniform_int(enc.preconception_earliest_week, -2), true});
  }
  std::optional<int> first_recorded_contact;
  if (recognition < t.end_week && (!visit || recognition < *visit)) {
    t.encounters.push_back({EncounterKind::PregnancyTest, recognition, t.in_system});
    if (t.in_system) first_recorded_contact = recognition;
  }
  if (visit) {
    for (int w = *visit; w < t.end_week; w += enc.visit_interval_weeks) {
      t.encounters.push_back({EncounterKind::PrenatalVisit, w, true});
      if (!first_recorded_contact) first_recorded_contact = w;
    }
  }
  bool end_recorded = t.in_system && !t.s_event;
  if (t.s_event && t.in_system && first_recorded_contact) {
    auto rec_rng = person_stream(seed, person_id, Purpose::LossRecording);
    end_recorded = rec_rng.bernoulli(enc.p_loss_recorded);
  }
  t.encounters.push_back({EncounterKind::DeliveryOrEnd, t.end_week, end_recorded});
  return t;
}

std::vector<Trajectory> simulate_cohort(const WorldParams& params) {
  validate(params);
  std::vector<Trajectory> out(params.n_persons);
  const auto n = params.n_persons;
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8u));
  if (workers == 1 || n < 4096) {
    for (std::uint64_t i = 0; i < n; ++i) out[i] = simulate_person(params, i);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const auto lo = w * chunk;
        const auto hi = std::min<std::uint64_t>(n, lo + chunk);
        for (auto i = lo; i < hi; ++i) out[i] = simulate_person(params, i);
      });
    }
  }
  return out;
}

}  // namespace pregtte
