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

#include "pregtte/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "pregtte/errors.hpp"

namespace pregtte {

std::string_view to_string(OracleKind k) {
  switch (k) {
    case OracleKind::Early: return "EARLY";
    case OracleKind::Late: return "LATE";
    case OracleKind::Joint: return "JOINT";
    case OracleKind::DecisionAtAnchor: return "DECISION_AT_ANCHOR";
  }
  return "?";
}

std::string_view to_string(TargetPopulation p) {
  switch (p) {
    case TargetPopulation::AllConceptions: return "ALL_CONCEPTIONS";
    case TargetPopulation::SurvivorsToAnchor: return "SURVIVORS_TO_ANCHOR";
    case TargetPopulation::ObservedAtAnchor: return "OBSERVED_AT_ANCHOR";
  }
  return "?";
}

OracleKind parse_oracle_kind(std::string_view s) {
  for (auto k : {OracleKind::Early, OracleKind::Late, OracleKind::Joint, OracleKind::DecisionAtAnchor})
    if (to_string(k) == s) return k;
  throw PreconditionError("unknown estimand kind '" + std::string(s) + "'");
}

TargetPopulation parse_target_population(std::string_view s) {
  for (auto p : {TargetPopulation::AllConceptions, TargetPopulation::SurvivorsToAnchor, TargetPopulation::ObservedAtAnchor})
    if (to_string(p) == s) return p;
  throw PreconditionError("unknown target population '" + std::string(s) + "'");
}

std::uint64_t oracle_seed(std::uint64_t seed) { return derive_key(seed, 0x0acc1e5eedULL); }
std::uint64_t repeat_seed(std::uint64_t seed, int repeat) {
  return derive_key(seed, 0x5eed0000ULL + static_cast<std::uint64_t>(repeat));
}

namespace {

// Neumaier compensated sum.
struct Sum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  void add(const Sum& o) {
    add(o.s);
    add(o.c);
  }
  double value() const { return s + c; }
};

struct Moments {
  std::uint64_t n = 0;
  Sum d, d2, y1, y0;
  void add(const Moments& o) {
    n += o.n;
    d.add(o.d);
    d2.add(o.d2);
    y1.add(o.y1);
    y0.add(o.y0);
  }
};

Intervention intervention_for(OracleKind kind, bool value) {
  switch (kind) {
    case OracleKind::Early: return {value, std::nullopt};
    case OracleKind::Late:
    case OracleKind::DecisionAtAnchor: return {std::nullopt, value};
    case OracleKind::Joint: return {value, value};
  }
  return {};
}

Moments run_draws(const WorldParams& params, const OracleEstimand& e, std::uint64_t draws) {
  const auto threads = std::max<std::uint64_t>(1, std::min<std::uint64_t>(std::thread::hardware_concurrency(), 16));
  const std::uint64_t chunk = (draws + threads - 1) / threads;
  std::vector<Moments> parts(threads);
  const auto treated = intervention_for(e.kind, e.treated_value);
  const auto untreated = intervention_for(e.kind, e.untreated_value);
  auto work = [&](std::uint64_t t) {
    Moments m;
    const std::uint64_t lo = t * chunk, hi = std::min(draws, lo + chunk);
    for (std::uint64_t id = lo; id < hi; ++id) {
      if (!in_target_population(simulate_person(params, id), e)) continue;
      const double y1 = simulate_person(params, id, treated).composite_outcome() ? 1.0 : 0.0;
      const double y0 = simulate_person(params, id, untreated).composite_outcome() ? 1.0 : 0.0;
      ++m.n;
      m.d.add(y1 - y0);
      m.d2.add((y1 - y0) * (y1 - y0));
      m.y1.add(y1);
      m.y0.add(y0);
    }
    parts[t] = m;
  };
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t t = 1; t < threads; ++t) pool.emplace_back(work, t);
    work(0);
  }
  Moments total;
  for (const auto& p : parts) total.add(p);
  return total;
}

OracleResult summarize(const Moments& m, std::uint64_t draws) {
  OracleResult r;
  r.draws = draws;
  r.population_size = m.n;
  if (m.n == 0) throw NumericalError("oracle target population is empty");
  const double n = static_cast<double>(m.n);
  r.truth = m.d.value() / n;
  r.risk_treated = m.y1.value() / n;
  r.risk_untreated = m.y0.value() / n;
  const double var = m.n > 1 ? std::max(0.0, (m.d2.value() - n * r.truth * r.truth) / (n - 1.0)) : 0.0;
  r.mc_se = std::sqrt(var / n);
  return r;
}

}  // namespace

bool in_target_population(const Trajectory& natural, const OracleEstimand& e) {
  switch (e.population) {
    case TargetPopulation::AllConceptions:
      return true;
    case TargetPopulation::SurvivorsToAnchor:
      return !(natural.s_event && *natural.s_event < natural.a1_week);
    case TargetPopulation::ObservedAtAnchor: {
      const auto rec = observe(natural, e.observation);
      if (!rec) return false;
      const std::vector<ObservedRecord> one{*rec};
      const auto cohort = build_cohort(one, design_spec(Anchor::FirstPrenatalVisit, e.protocol), e.protocol);
      if (cohort.members.empty()) return false;
      return !e.prior_user_stratum || cohort.members.front().prior_user == *e.prior_user_stratum;
    }
  }
  return false;
}

OracleResult oracle_effect(const WorldParams& params, const OracleEstimand& estimand) {
  if (estimand.kind == OracleKind::DecisionAtAnchor && estimand.population == TargetPopulation::AllConceptions)
    throw PreconditionError("DECISION_AT_ANCHOR needs a population defined at the anchor");
  if (estimand.mc_draws == 0) throw PreconditionError("mc_draws must be positive");
  validate(params);
  WorldParams p = params;
  p.seed = oracle_seed(params.seed);

  if (estimand.max_se) {
    const std::uint64_t pilot_draws = std::min<std::uint64_t>(estimand.mc_draws, 20'000);
    const auto pilot = summarize(run_draws(p, estimand, pilot_draws), pilot_draws);
    const double ratio = pilot.mc_se / *estimand.max_se;
    const auto required = static_cast<std::uint64_t>(std::ceil(static_cast<double>(pilot_draws) * ratio * ratio));
    if (required > estimand.mc_draws)
      throw PreconditionError("oracle needs about " + std::to_string(required) + " draws for standard error " +
                              std::to_string(*estimand.max_se) + "; mc_draws is " +
                              std::to_string(estimand.mc_draws));
  }
  return summarize(run_draws(p, estimand, estimand.mc_draws), estimand.mc_draws);
}

BiasTable bias_table(const WorldParams& params, const std::vector<Anchor>& designs, const ProtocolSpec& protocol,
                     const OracleEstimand& estimand, const BiasOptions& options) {
  return bias_table(params, designs, protocol, estimand, oracle_effect(params, estimand), options);
}

BiasTable bias_table(const WorldParams& params, const std::vector<Anchor>& designs, const ProtocolSpec& protocol,
                     const OracleEstimand& estimand, const OracleResult& truth, const BiasOptions& options) {
  if (options.repeats <= 0) throw PreconditionError("repeats must be positive");
  BiasTable table;
  table.estimand = estimand;
  table.truth = truth;
  for (auto d : designs) {
    BiasRow row;
    row.design = std::string(to_string(d));
    table.rows.push_back(row);
  }
  std::vector<double> immortal(designs.size()), sizes(designs.size()), covered(designs.size());
  for (int r = 0; r < options.repeats; ++r) {
    WorldParams p = params;
    p.seed = repeat_seed(params.seed, r);
    const auto trajectories = simulate_cohort(p);
    const auto records = observed_cohort(trajectories, estimand.observation);
    for (std::size_t i = 0; i < designs.size(); ++i) {
      auto cohort = build_cohort(records, design_spec(designs[i], protocol), protocol, trajectories, estimand.observation);
      if (options.stratum) cohort = stratum(cohort, *options.stratum);
      EstimationOptions eo;
      eo.contrast = options.contrast;
      eo.bootstrap = options.bootstrap;
      eo.seed = derive_key(p.seed, i);
      eo.truncation_quantile = options.truncation_quantile;
      const auto est = estimate_effect(cohort, eo);
      const auto& rd = est.risk_difference;
      table.rows[i].estimates.push_back(rd.point);
      immortal[i] += static_cast<double>(est.immortal_person_weeks);
      sizes[i] += static_cast<double>(cohort.members.size());
      if (rd.ci_low <= truth.truth && truth.truth <= rd.ci_high) covered[i] += 1.0;
    }
  }
  const double n = options.repeats;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    auto& row = table.rows[i];
    row.repeats = options.repeats;
    Sum s;
    for (double x : row.estimates) s.add(x);
    row.mean_estimate = s.value() / n;
    Sum ss;
    for (double x : row.estimates) ss.add((x - row.mean_estimate) * (x - row.mean_estimate));
    row.empirical_se = options.repeats > 1 ? std::sqrt(ss.value() / (n - 1.0)) : 0.0;
    row.bias = row.mean_estimate - truth.truth;
    row.mean_immortal_weeks = immortal[i] / n;
    row.mean_cohort_size = sizes[i] / n;
    if (options.bootstrap > 0) row.coverage = covered[i] / n;
  }
  return table;
}

}  // namespace pregtte
