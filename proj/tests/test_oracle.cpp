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

#include <cmath>
#include <set>

#include "pregtte/errors.hpp"
#include "pregtte/oracle.hpp"

using namespace pregtte;

TEST(Oracle, NullWorldTruthIsExactlyZero) {
  const auto p = preset("null");
  for (auto kind : {OracleKind::Early, OracleKind::Late, OracleKind::Joint}) {
    OracleEstimand e;
    e.kind = kind;
    e.mc_draws = 20000;
    const auto r = oracle_effect(p, e);
    EXPECT_EQ(r.truth, 0.0) << to_string(kind);
    EXPECT_EQ(r.risk_treated, r.risk_untreated);
    EXPECT_EQ(r.draws, 20000u);
  }
}

TEST(Oracle, DecisionAtAnchorNeedsAnAnchoredPopulation) {
  OracleEstimand e;
  e.kind = OracleKind::DecisionAtAnchor;
  e.population = TargetPopulation::AllConceptions;
  e.mc_draws = 1000;
  EXPECT_THROW(oracle_effect(preset("fig3b"), e), PreconditionError);
}

TEST(Oracle, RefusesUnreachableStandardError) {
  OracleEstimand e;
  e.mc_draws = 2000;
  e.max_se = 1e-6;
  EXPECT_THROW(oracle_effect(preset("fig3a"), e), PreconditionError);
}

TEST(Oracle, SeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s : {1u, 2u, 3u}) {
    seen.insert(oracle_seed(s));
    for (int r = 0; r < 300; ++r) seen.insert(repeat_seed(s, r));
  }
  EXPECT_EQ(seen.size(), 3u * 301u);
}

TEST(Oracle, AgreesWithDirectInterventionAverage) {
  // Independent Monte Carlo of the EARLY contrast on a different seed.
  auto p = preset("fig3a");
  OracleEstimand e;
  e.mc_draws = 40000;
  const auto r = oracle_effect(p, e);
  p.seed = 987654;
  const int n = 40000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double d = (simulate_person(p, i, {true, std::nullopt}).composite_outcome() ? 1.0 : 0.0) -
                     (simulate_person(p, i, {false, std::nullopt}).composite_outcome() ? 1.0 : 0.0);
    sum += d;
    sum2 += d * d;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - r.truth), 4.0 * std::hypot(se, r.mc_se));
  EXPECT_GT(r.mc_se, 0.0);
}

TEST(Oracle, SurvivorPopulationIsASubset) {
  OracleEstimand e;
  e.kind = OracleKind::Late;
  e.population = TargetPopulation::SurvivorsToAnchor;
  e.mc_draws = 20000;
  const auto r = oracle_effect(preset("fig3b"), e);
  EXPECT_GT(r.population_size, 0u);
  EXPECT_LT(r.population_size, r.draws);
}

TEST(BiasTable, ShapeAndDeterminism) {
  auto p = preset("null");
  p.n_persons = 3000;
  OracleEstimand e;
  e.kind = OracleKind::DecisionAtAnchor;
  e.population = TargetPopulation::ObservedAtAnchor;
  e.mc_draws = 5000;
  e.protocol = shipped_protocol("stop_or_go");
  BiasOptions o;
  o.repeats = 3;
  const std::vector<Anchor> designs{Anchor::FirstPrenatalVisit, Anchor::RetroEndOfPregnancy};
  const auto a = bias_table(p, designs, e.protocol, e, o);
  const auto b = bias_table(p, designs, e.protocol, e, o);
  ASSERT_EQ(a.rows.size(), 2u);
  EXPECT_EQ(a.truth.truth, 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.rows[i].estimates.size(), 3u);
    EXPECT_EQ(a.rows[i].estimates, b.rows[i].estimates);
    EXPECT_NEAR(a.rows[i].bias, a.rows[i].mean_estimate - a.truth.truth, 1e-15);
  }
}
