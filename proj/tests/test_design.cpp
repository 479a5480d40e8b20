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

#include "pregtte/design.hpp"
#include "pregtte/errors.hpp"
#include "pregtte/observation.hpp"

using namespace pregtte;

namespace {

/// Hand-built record: prenatal visits at `visits`, claims on from `on_from`
/// (inclusive) to `on_to` (exclusive) over weeks [-26, end].
ObservedRecord record(std::uint64_t id, std::vector<int> visits, int end, std::optional<EndType> end_type,
                      std::optional<bool> outcome, int on_from, int on_to) {
  ObservedRecord r;
  r.person_id = id;
  for (int v : visits) r.visible_encounters.push_back({EncounterKind::PrenatalVisit, v, true});
  r.first_pregnancy_contact_week = visits.empty() ? end : visits.front();
  r.baseline_covariates = {{kCovChronic, 1.0}, {kCovPrepregUser, 0.0}, {kCovUProxy, 0.0}};
  for (int w = -26; w <= end; ++w) r.treatment_claims.push_back({w, w >= on_from && w < on_to});
  if (end_type) {
    r.visible_encounters.push_back({EncounterKind::DeliveryOrEnd, end, true});
    r.observed_end = ObservedEnd{end, *end_type};
  }
  r.observed_outcome = outcome;
  return r;
}

const ProtocolSpec& sog() {
  static const auto p = shipped_protocol("stop_or_go");
  return p;
}

std::vector<ObservedRecord> observed_world(const char* name, std::uint64_t n, std::vector<Trajectory>* truth = nullptr) {
  auto p = preset(name);
  p.n_persons = n;
  auto t = simulate_cohort(p);
  auto obs = observed_cohort(t, {});
  if (truth) *truth = std::move(t);
  return obs;
}

}  // namespace

TEST(Design, AnchorIsFirstVisitInWindow) {
  const std::vector<ObservedRecord> recs{record(1, {3, 7, 11}, 39, EndType::LiveBirth, true, -10, 100)};
  const auto c = build_cohort(recs, design_spec(Anchor::FirstPrenatalVisit, sog()), sog());
  ASSERT_EQ(c.members.size(), 1u);
  EXPECT_EQ(c.members[0].t0_week, 7);
  EXPECT_TRUE(c.members[0].treated);
  EXPECT_EQ(c.members[0].terminal, Terminal::Event);
  EXPECT_EQ(c.members[0].terminal_week, 39 - 7);
  EXPECT_EQ(c.members[0].immortal_weeks, 0);
}

TEST(Design, TerminalRules) {
  const std::vector<ObservedRecord> recs{
      record(1, {8}, 39, EndType::LiveBirth, false, -10, 100),  // no outcome: admin end after horizon
      record(2, {8}, 14, EndType::Loss, std::nullopt, -10, 100),  // loss: competing
      record(3, {8, 12}, 18, std::nullopt, std::nullopt, -10, 100),  // no end: censored after the gap
  };
  const auto c = build_cohort(recs, design_spec(Anchor::FirstPrenatalVisit, sog()), sog());
  ASSERT_EQ(c.members.size(), 3u);
  EXPECT_EQ(c.members[0].terminal, Terminal::AdminEnd);
  EXPECT_EQ(c.members[0].terminal_week, 39 + 12 - 8);
  EXPECT_EQ(c.members[1].terminal, Terminal::Competing);
  EXPECT_EQ(c.members[1].terminal_week, 14 - 8);
  EXPECT_EQ(c.members[2].terminal, Terminal::Censored);
  EXPECT_EQ(c.members[2].terminal_week, 12 + 9 - 8);
  // Claims stop at week 18 for the censored member; later weeks are unknown.
  EXPECT_EQ(c.members[2].treatment.back(), kClaimUnknown);
}

TEST(Design, CompetingEventNoneCensorsLosses) {
  auto p = sog();
  p.competing_event = "none";
  const std::vector<ObservedRecord> recs{record(2, {8}, 14, EndType::Loss, std::nullopt, -10, 100)};
  const auto c = build_cohort(recs, design_spec(Anchor::FirstPrenatalVisit, p), p);
  EXPECT_EQ(c.members.at(0).terminal, Terminal::Censored);
}

TEST(Design, EligibilityExclusions) {
  auto no_chronic = record(1, {8}, 39, EndType::LiveBirth, false, -10, 100);
  no_chronic.baseline_covariates[kCovChronic] = 0.0;
  const std::vector<ObservedRecord> recs{
      no_chronic,
      record(2, {8}, 39, EndType::LiveBirth, false, 100, 100),  // never treated: not a current user
      record(3, {20}, 39, EndType::LiveBirth, false, -10, 100),  // visit outside window
  };
  const auto c = build_cohort(recs, design_spec(Anchor::FirstPrenatalVisit, sog()), sog());
  EXPECT_TRUE(c.members.empty());
  EXPECT_EQ(c.exclusions.at("no_chronic_condition"), 1u);
  EXPECT_EQ(c.exclusions.at("not_current_user"), 1u);
  EXPECT_EQ(c.exclusions.at("no_anchor_in_window"), 1u);
  EXPECT_EQ(c.n_screened, 3u);
  EXPECT_EQ(c.n_excluded(), 3u);
}

TEST(Design, AssignmentAtAnchorVersusLmp) {
  // Stopped at week 6: treated at LMP, untreated at a week-8 anchor.
  const std::vector<ObservedRecord> recs{record(1, {8}, 39, EndType::LiveBirth, false, -10, 6)};
  const auto d = build_cohort(recs, design_spec(Anchor::ProspectiveFirstContact, sog()), sog());
  EXPECT_TRUE(d.members.at(0).treated);
  EXPECT_EQ(d.members.at(0).immortal_weeks, 8);
  auto p = sog();
  p.eligibility = {EligibilityRule::ChronicCondition};
  const auto e = build_cohort(recs, design_spec(Anchor::FirstPrenatalVisit, p), p);
  EXPECT_FALSE(e.members.at(0).treated);
  EXPECT_EQ(e.members.at(0).covariates.at("treated_at_lmp"), 1.0);
}

TEST(Design, PreconditionErrors) {
  const std::vector<ObservedRecord> recs;
  DesignSpec wide = design_spec(Anchor::FirstPrenatalVisit, sog());
  wide.window_last_week = 30;
  EXPECT_THROW(build_cohort(recs, wide, sog()), PreconditionError);
  EXPECT_THROW(build_cohort(recs, design_spec(Anchor::LmpIdeal, sog()), sog()), PreconditionError);
}

TEST(Design, ParseAnchorNames) {
  EXPECT_EQ(parse_anchor("4D"), Anchor::FirstPrenatalVisit);
  EXPECT_EQ(parse_anchor(anchor_name(Anchor::PreconceptionVisit)), Anchor::PreconceptionVisit);
  EXPECT_THROW(parse_anchor("5Z"), PreconditionError);
}

TEST(ImmortalTime, ZeroForDecisionAndPreconceptionAnchors) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto p = preset("fig3b");
    p.n_persons = 20000;
    p.seed = seed;
    const auto obs = observed_cohort(simulate_cohort(p), {});
    // No pre-pregnancy use in this world, so drop the current-use rule.
    auto protocol = sog();
    protocol.eligibility = {EligibilityRule::ChronicCondition};
    for (Anchor a : {Anchor::FirstPrenatalVisit, Anchor::PreconceptionVisit}) {
      const auto c = build_cohort(obs, design_spec(a, protocol), protocol);
      EXPECT_GT(c.members.size(), 100u);
      EXPECT_EQ(immortal_time(c).total, 0);
    }
  }
}

TEST(ImmortalTime, FirstContactDesignEqualsRecountedGaps) {
  const auto obs = observed_world("fig3b", 20000);
  const auto c = build_cohort(obs, design_spec(Anchor::ProspectiveFirstContact, sog()), sog());
  // Recount from the raw encounters: LMP to the first pregnancy-related contact, eligible persons only.
  long long expected = 0;
  for (const auto& r : obs) {
    if (r.baseline_covariates.at(kCovChronic) != 1.0) continue;
    int first = 1000;
    for (const auto& e : r.visible_encounters)
      if (e.kind != EncounterKind::PreconceptionCounseling) first = std::min(first, e.week);
    expected += first;
  }
  EXPECT_EQ(immortal_time(c).total, expected);
}

TEST(Stratum, PartitionsMembers) {
  auto p = preset("prevalent_user");
  p.n_persons = 10000;
  const auto obs = observed_cohort(simulate_cohort(p), {});
  const auto chap = shipped_protocol("chap");
  const auto c = build_cohort(obs, design_spec(Anchor::FirstPrenatalVisit, chap), chap);
  const auto a = stratum(c, true);
  const auto b = stratum(c, false);
  EXPECT_EQ(a.members.size() + b.members.size(), c.members.size());
  EXPECT_GT(a.members.size(), 0u);
  for (const auto& m : a.members) EXPECT_TRUE(m.prior_user);
}

TEST(Design, LmpIdealUsesTruth) {
  std::vector<Trajectory> truth;
  observed_world("fig3a", 3000, &truth);
  const auto c = build_cohort({}, design_spec(Anchor::LmpIdeal, sog()), sog(), truth);
  EXPECT_EQ(c.n_screened, truth.size());
  EXPECT_EQ(c.members.size(), truth.size());  // every fig3a pregnancy has the chronic condition
  for (const auto& m : c.members) EXPECT_EQ(m.treated, truth[m.person_id].a0);
}
