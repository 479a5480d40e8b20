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

#include <gtest/gtest.h>

#include "pregtte/errors.hpp"
#include "pregtte/scm.hpp"

using namespace pregtte;

namespace {

WorldParams small(const char* name, std::uint64_t n = 3000) {
  auto p = preset(name);
  p.n_persons = n;
  return p;
}

}  // namespace

TEST(Scm, CohortIsDeterministic) {
  const auto p = small("fig3c");
  EXPECT_EQ(simulate_cohort(p), simulate_cohort(p));
  auto q = p;
  q.seed = 2;
  EXPECT_NE(simulate_cohort(p), simulate_cohort(q));
}

TEST(Scm, PersonDependsOnlyOnSeedAndId) {
  const auto p = small("fig3b", 5000);
  const auto cohort = simulate_cohort(p);
  for (std::uint64_t id : {0ull, 17ull, 4096ull, 4999ull}) EXPECT_EQ(cohort[id], simulate_person(p, id));
}

TEST(Scm, LossOnlyInsideEarlyWindow) {
  for (const auto& t : simulate_cohort(small("fig3b", 20000))) {
    if (!t.s_event) continue;
    EXPECT_GE(*t.s_event, 1);
    EXPECT_LE(*t.s_event, 19);
    EXPECT_EQ(t.end_week, *t.s_event);
    EXPECT_FALSE(t.y.has_value());
  }
}

TEST(Scm, HazardIgnoresLaterTreatment) {
  // Intervening on A1 must leave the loss history untouched.
  const auto p = small("fig3b");
  for (std::uint64_t id = 0; id < 2000; ++id) {
    const auto on = simulate_person(p, id, {.a0 = true, .a1 = true});
    const auto off = simulate_person(p, id, {.a0 = true, .a1 = false});
    EXPECT_EQ(on.s_event, off.s_event);
    EXPECT_EQ(on.encounters, off.encounters);
  }
}

TEST(Scm, StructuralHazardFormula) {
  auto p = small("fig3b");
  EXPECT_EQ(structural_hazard(p, 0.3, true, 0), 0.0);
  EXPECT_EQ(structural_hazard(p, 0.3, true, 20), 0.0);
  const double lp = std::log(0.015 / 0.985) + 0.8 * 0.3 + 1.5;
  EXPECT_NEAR(structural_hazard(p, 0.3, true, 5), 1.0 / (1.0 + std::exp(-lp)), 1e-15);
}

TEST(Scm, A1DecidedAtFirstPrenatalVisit) {
  for (const auto& t : simulate_cohort(small("fig3a", 5000))) {
    const auto v = t.first_prenatal_visit();
    if (v) {
      EXPECT_EQ(t.a1_week, *v);
    } else if (!t.lost() && t.in_system) {
      ADD_FAILURE() << "in-system live birth without a prenatal visit";
    } else if (!t.in_system) {
      EXPECT_EQ(t.a1_week, 12);
    }
    if (t.on_treatment(t.a1_week)) {
      EXPECT_TRUE(t.a1);
    }
    if (t.a1_week > 0) {
      EXPECT_EQ(t.on_treatment(0), t.a0);
    }
  }
}

TEST(Scm, ScenarioConstraintsRemoveArrows) {
  auto p = preset("fig3c");
  p.scenario = Scenario::Fig3A;
  const auto q = with_scenario_constraints(p);
  EXPECT_EQ(q.coef_u_on_a0, 0.0);
  EXPECT_EQ(q.coef_u_on_a1, 0.0);
  EXPECT_EQ(q.coef_a0_on_s, 0.0);
  p.scenario = Scenario::Fig3B;
  EXPECT_EQ(with_scenario_constraints(p).coef_a0_on_s, p.coef_a0_on_s);
}

TEST(Scm, NullWorldHasNoTreatmentEffect) {
  // Same person under both interventions: identical outcome and loss.
  const auto p = small("null");
  for (std::uint64_t id = 0; id < 3000; ++id) {
    const auto a = simulate_person(p, id, {.a0 = true, .a1 = true});
    const auto b = simulate_person(p, id, {.a0 = false, .a1 = false});
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.s_event, b.s_event);
  }
}

TEST(Scm, PrevalentUsersDepletedOfSusceptibles) {
  const auto cohort = simulate_cohort(small("prevalent_user", 40000));
  double users = 0, users_susc = 0, non = 0, non_susc = 0;
  for (const auto& t : cohort) {
    (t.prepreg_user ? users : non) += 1;
    if (t.susceptible) (t.prepreg_user ? users_susc : non_susc) += 1;
  }
  ASSERT_GT(users, 1000);
  EXPECT_LT(users_susc / users, non_susc / non - 0.05);
}

TEST(Scm, ValidateRejectsBadProbabilities) {
  auto p = preset("null");
  p.encounters.p_no_prenatal_care = 0.9;
  p.encounters.p_late_prenatal_after_week12 = 0.2;
  EXPECT_THROW(validate(p), ParameterError);
  p = preset("null");
  p.term_week_min = 42;
  p.term_week_max = 40;
  EXPECT_THROW(validate(p), ParameterError);
  EXPECT_THROW(preset("fig9"), ParameterError);
}

TEST(Scm, OutOfSystemPersonsAreNotRecorded) {
  for (const auto& t : simulate_cohort(small("fig3a", 5000))) {
    if (t.in_system) continue;
    for (const auto& e : t.encounters)
      if (e.kind != EncounterKind::PreconceptionCounseling) {
        EXPECT_FALSE(e.recorded);
      }
  }
}
