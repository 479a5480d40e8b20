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

#include "pregtte/estimation.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <limits>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "pregtte/errors.hpp"
#include "pregtte/rng.hpp"

namespace pregtte {

StrategyKind resolve_strategy(StrategyKind kind, bool on_at_anchor) {
  if (kind == StrategyKind::Treat) return on_at_anchor ? StrategyKind::Continue : StrategyKind::Initiate;
  if (kind == StrategyKind::NoTreat) return on_at_anchor ? StrategyKind::Discontinue : StrategyKind::Withhold;
  return kind;
}

std::optional<int> deviation_week(const CohortMember& member, StrategyKind kind, int grace_period_weeks) {
  kind = resolve_strategy(kind, member.on_at_anchor);
  for (int k = 0; k < static_cast<int>(member.treatment.size()); ++k) {
    const auto t = member.treatment[static_cast<std::size_t>(k)];
    if (t == kClaimUnknown) continue;
    switch (kind) {
      case StrategyKind::Continue:
        if (t == 0) return k;
        break;
      case StrategyKind::Initiate:
        if (k > grace_period_weeks && t == 0) return k;
        break;
      default:
        if (k > grace_period_weeks && t == 1) return k;
        break;
    }
  }
  return std::nullopt;
}

std::string_view to_string(Scale s) { return s == Scale::RiskDifference ? "RISK_DIFFERENCE" : "RISK_RATIO"; }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw PreconditionError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<double> multinomial_counts(std::span<const double> sizes, std::uint64_t key) {
  Stream rng(key);
  double mass = std::accumulate(sizes.begin(), sizes.end(), 0.0);
  long long remaining = std::llround(mass);
  std::vector<double> out(sizes.size(), 0.0);
  for (std::size_t i = 0; i < sizes.size() && remaining > 0; ++i) {
    if (i + 1 == sizes.size() || sizes[i] >= mass) {
      out[i] = static_cast<double>(remaining);
      break;
    }
    const double p = std::clamp(sizes[i] / mass, 0.0, 1.0);
    std::binomial_distribution<long long> draw(remaining, p);
    const long long k = draw(rng);
    out[i] = static_cast<double>(k);
    remaining -= k;
    mass -= sizes[i];
  }
  return out;
}

namespace {

constexpr int kNever = INT_MAX;

CifCurve aalen_johansen(const std::vector<double>& at_risk, const std::vector<double>& d_out,
                        const std::vector<double>& d_comp) {
  CifCurve c;
  double s = 1.0, f = 0.0, g = 0.0;
  for (std::size_t k = 0; k < at_risk.size(); ++k) {
    const double hy = at_risk[k] > 0 ? d_out[k] / at_risk[k] : 0.0;
    const double hs = at_risk[k] > 0 ? d_comp[k] / at_risk[k] : 0.0;
    f += s * hy;
    g += s * hs;
    s *= 1.0 - hy - hs;
    c.outcome.push_back(f);
    c.competing.push_back(g);
    c.survival.push_back(s);
  }
  return c;
}

// Adds one unit to the weekly risk-set sums. `censor_at` is an artificial
// censoring week (kNever if none); weight(k) gives the unit's weight in week k.
template <class W>
void accumulate(int terminal_week, Terminal terminal, int censor_at, W&& weight, std::vector<double>& n,
                std::vector<double>& dy, std::vector<double>& ds) {
  const bool artificial = censor_at <= terminal_week;
  int last = artificial ? censor_at - 1 : (terminal == Terminal::Censored ? terminal_week - 1 : terminal_week);
  for (int k = 0; k <= last; ++k) n[static_cast<std::size_t>(k)] += weight(k);
  if (!artificial && last == terminal_week) {
    if (terminal == Terminal::Event) dy[static_cast<std::size_t>(last)] += weight(last);
    if (terminal == Terminal::Competing) ds[static_cast<std::size_t>(last)] += weight(last);
  }
}

}  // namespace

CifCurve cuminc_competing(std::span<const FollowUpUnit> units) {
  int horizon = 0;
  for (const auto& u : units) horizon = std::max(horizon, u.terminal_week);
  std::vector<double> n(static_cast<std::size_t>(horizon) + 1), dy(n.size()), ds(n.size());
  for (const auto& u : units)
    accumulate(u.terminal_week, u.terminal, kNever, [&](int) { return u.weight; }, n, dy, ds);
  return aalen_johansen(n, dy, ds);
}

CifCurve cuminc_competing(const AnalyticCohort& cohort) {
  std::vector<FollowUpUnit> units;
  for (const auto& m : cohort.members) units.push_back({m.terminal_week, m.terminal, 1.0});
  return cuminc_competing(units);
}

std::vector<Clone> clone_expand(const AnalyticCohort& cohort) {
  std::vector<Clone> out;
  out.reserve(cohort.members.size() * 2);
  for (std::size_t i = 0; i < cohort.members.size(); ++i) {
    const auto& m = cohort.members[i];
    for (int arm = 0; arm < 2; ++arm) {
      Clone c;
      c.member = i;
      c.arm = arm;
      const auto dev = deviation_week(m, cohort.protocol.strategies[static_cast<std::size_t>(arm)].kind,
                                      cohort.protocol.grace_period_weeks);
      if (dev && *dev <= m.terminal_week) c.artificial_censor_week = dev;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<CloneRow> clone_rows(const AnalyticCohort& cohort, const std::vector<Clone>& clones) {
  std::vector<CloneRow> out;
  for (const auto& c : clones) {
    const auto& m = cohort.members[c.member];
    const int last = c.artificial_censor_week.value_or(m.terminal_week);
    for (int k = 0; k <= last; ++k) {
      CloneRow r;
      r.person_id = m.person_id;
      r.replicate_strategy = cohort.protocol.strategies[static_cast<std::size_t>(c.arm)].label;
      r.week_since_t0 = k;
      r.artificial_censor_week = c.artificial_censor_week;
      r.deviated = c.artificial_censor_week && k == *c.artificial_censor_week;
      r.ipc_weight = c.ipc_weight.empty() ? 1.0 : c.ipc_weight[static_cast<std::size_t>(k)];
      if (r.deviated) {
        r.censored = true;
      } else if (k == m.terminal_week) {
        r.event = m.terminal == Terminal::Event;
        r.competing_event = m.terminal == Terminal::Competing;
        r.censored = m.terminal == Terminal::Censored;
      }
      out.push_back(r);
    }
  }
  return out;
}

namespace {

// A set of cohort members with identical analysis-relevant data. Grouping
// makes refits inside the bootstrap cheap; with count 1 per member it is the
// ungrouped analysis.
struct Unit {
  double count = 0.0;
  int terminal_week = 0;
  Terminal terminal = Terminal::AdminEnd;
  bool treated = false;
  std::array<int, 2> censor{kNever, kNever};
  std::size_t pattern = 0;  // index of the distinct covariate vector
  std::vector<std::size_t> members;
};

struct UnitSet {
  std::vector<std::string> names;
  std::vector<std::vector<double>> patterns;  // covariate values per pattern
  std::vector<Unit> units;
  int horizon = 0;
};

UnitSet make_units(const AnalyticCohort& cohort, const std::vector<std::string>& confounders, bool group,
                   std::vector<std::string>& notes) {
  UnitSet set;
  for (const auto& name : confounders) {
    const bool present = !cohort.members.empty() && cohort.members.front().covariates.contains(name);
    if (present) set.names.push_back(name);
    else if (!cohort.members.empty()) notes.push_back("confounder '" + name + "' is not known at t0 and was skipped");
  }
  std::map<std::vector<double>, std::size_t> pattern_index;
  std::map<std::vector<double>, std::size_t> unit_index;
  for (std::size_t i = 0; i < cohort.members.size(); ++i) {
    const auto& m = cohort.members[i];
    std::vector<double> x;
    for (const auto& name : set.names) x.push_back(m.covariates.at(name));
    auto [pit, fresh] = pattern_index.try_emplace(x, set.patterns.size());
    if (fresh) set.patterns.push_back(x);

    Unit u;
    u.count = 1.0;
    u.terminal_week = m.terminal_week;
    u.terminal = m.terminal;
    u.treated = m.treated;
    u.pattern = pit->second;
    u.members = {i};
    for (int arm = 0; arm < 2; ++arm) {
      const auto dev = deviation_week(m, cohort.protocol.strategies[static_cast<std::size_t>(arm)].kind,
                                      cohort.protocol.grace_period_weeks);
      if (dev && *dev <= m.terminal_week) u.censor[static_cast<std::size_t>(arm)] = *dev;
    }
    set.horizon = std::max(set.horizon, m.terminal_week);
    if (!group) {
      set.units.push_back(std::move(u));
      continue;
    }
    std::vector<double> key = {static_cast<double>(u.pattern), static_cast<double>(u.terminal_week),
                               static_cast<double>(u.terminal), u.treated ? 1.0 : 0.0,
                               static_cast<double>(u.censor[0]), static_cast<double>(u.censor[1])};
    auto [uit, new_unit] = unit_index.try_emplace(key, set.units.size());
    if (new_unit) {
      set.units.push_back(std::move(u));
    } else {
      set.units[uit->second].count += 1.0;
      set.units[uit->second].members.push_back(i);
    }
  }
  return set;
}

// Columns of `rows` that vary among rows with positive weight.
std::vector<std::size_t> varying_columns(const std::vector<std::vector<double>>& rows, const std::vector<double>& w) {
  std::vector<std::size_t> out;
  if (rows.empty()) return out;
  for (std::size_t j = 0; j < rows.front().size(); ++j) {
    std::optional<double> first;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (w[i] <= 0) continue;
      if (!first) first = rows[i][j];
      else if (rows[i][j] != *first) {
        out.push_back(j);
        break;
      }
    }
  }
  return out;
}

Eigen::MatrixXd design_matrix(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size() + 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < cols.size(); ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = rows[i][cols[j]];
  }
  return x;
}

// Fits P(y=1 | row) on weighted binomial cells and returns fitted
// probabilities for `predict_rows`. Constant columns are dropped; a rank
// deficient remainder falls back to the intercept-only model.
std::vector<double> fit_cells(const std::vector<std::vector<double>>& rows, const std::vector<double>& n_total,
                              const std::vector<double>& n_yes, const std::vector<std::vector<double>>& predict_rows,
                              const std::string& what, std::vector<std::string>& notes, std::optional<LogisticFit>* fit_out) {
  auto cols = varying_columns(rows, n_total);
  std::vector<std::vector<double>> xr;
  std::vector<double> yv, wv;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (n_yes[i] > 0) {
      xr.push_back(rows[i]);
      yv.push_back(1.0);
      wv.push_back(n_yes[i]);
    }
    if (n_total[i] - n_yes[i] > 0) {
      xr.push_back(rows[i]);
      yv.push_back(0.0);
      wv.push_back(n_total[i] - n_yes[i]);
    }
  }
  const Eigen::Map<const Eigen::VectorXd> y(yv.data(), static_cast<Eigen::Index>(yv.size()));
  const Eigen::Map<const Eigen::VectorXd> w(wv.data(), static_cast<Eigen::Index>(wv.size()));
  LogisticFit fit;
  try {
    fit = fit_logistic(design_matrix(xr, cols), y, w);
  } catch (const StructuralError&) {
    notes.push_back(what + ": collinear covariates, intercept-only model used");
    cols.clear();
    fit = fit_logistic(design_matrix(xr, cols), y, w);
  }
  if (!fit.converged) notes.push_back(what + ": model did not converge (separation)");
  if (fit_out) *fit_out = fit;
  const Eigen::VectorXd p = predict_probability(fit, design_matrix(predict_rows, cols));
  return std::vector<double>(p.data(), p.data() + p.size());
}

std::array<CifCurve, 2> arm_curves(const UnitSet& set, std::span<const double> counts,
                                   const std::vector<double>& unit_weight) {
  std::array<CifCurve, 2> out;
  for (int arm = 0; arm < 2; ++arm) {
    const auto h = static_cast<std::size_t>(set.horizon) + 1;
    std::vector<double> n(h), dy(h), ds(h);
    double mass = 0.0;
    for (std::size_t i = 0; i < set.units.size(); ++i) {
      const auto& u = set.units[i];
      if (counts[i] <= 0 || u.treated != (arm == 0)) continue;
      const double w = counts[i] * unit_weight[i];
      mass += w;
      accumulate(u.terminal_week, u.terminal, kNever, [&](int) { return w; }, n, dy, ds);
    }
    if (mass <= 0) throw NumericalError("arm '" + std::string(arm == 0 ? "treated" : "untreated") + "' is empty");
    out[static_cast<std::size_t>(arm)] = aalen_johansen(n, dy, ds);
  }
  return out;
}

// Baseline propensity weights for each unit.
std::vector<double> unit_ipw(const UnitSet& set, std::span<const double> counts, bool stabilized,
                             std::vector<std::string>& notes, std::optional<LogisticFit>* fit_out,
                             std::vector<std::string>* used) {
  std::vector<std::vector<double>> rows;
  std::vector<double> total, yes;
  double n_all = 0.0, n_treated = 0.0;
  for (std::size_t i = 0; i < set.units.size(); ++i) {
    rows.push_back(set.patterns[set.units[i].pattern]);
    total.push_back(counts[i]);
    yes.push_back(set.units[i].treated ? counts[i] : 0.0);
    n_all += counts[i];
    n_treated += yes.back();
  }
  std::vector<double> weights(set.units.size(), 1.0);
  const auto cols = varying_columns(rows, total);
  if (used)
    for (auto c : cols) used->push_back(set.names[c]);
  if (cols.empty() || n_all <= 0) return weights;
  const auto p = fit_cells(rows, total, yes, rows, "propensity model", notes, fit_out);
  const double marginal = n_treated / n_all;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double pi = p[i];
    if (pi < kPositivityEpsilon || pi > 1.0 - kPositivityEpsilon) {
      std::string stratum;
      for (auto c : cols) stratum += (stratum.empty() ? "" : ", ") + set.names[c] + "=" + std::to_string(set.patterns[set.units[i].pattern][c]);
      const std::string msg = "positivity: propensity " + std::to_string(pi) + " in stratum {" + stratum + "}";
      if (std::find(notes.begin(), notes.end(), msg) == notes.end()) notes.push_back(msg);
      pi = std::clamp(pi, kPositivityEpsilon, 1.0 - kPositivityEpsilon);
    }
    const double pa = set.units[i].treated ? pi : 1.0 - pi;
    const double num = stabilized ? (set.units[i].treated ? marginal : 1.0 - marginal) : 1.0;
    weights[i] = num / pa;
  }
  return weights;
}

std::array<double, 2> itt_risks(const UnitSet& set, std::span<const double> counts, bool stabilized,
                                std::vector<std::string>& notes) {
  const auto w = unit_ipw(set, counts, stabilized, notes, nullptr, nullptr);
  const auto curves = arm_curves(set, counts, w);
  return {curves[0].final_outcome(), curves[1].final_outcome()};
}

}  // namespace

IpwResult ipw_weights(const AnalyticCohort& cohort, const std::vector<std::string>& confounders, bool stabilized) {
  IpwResult out;
  auto set = make_units(cohort, confounders, false, out.warnings);
  std::vector<double> counts(set.units.size(), 1.0);
  const auto w = unit_ipw(set, counts, stabilized, out.warnings, &out.fit, &out.covariates);
  out.weights.assign(cohort.members.size(), 1.0);
  for (std::size_t i = 0; i < set.units.size(); ++i) out.weights[set.units[i].members.front()] = w[i];
  if (!out.weights.empty())
    out.mean_weight = std::accumulate(out.weights.begin(), out.weights.end(), 0.0) / static_cast<double>(out.weights.size());
  return out;
}

namespace {

struct CensorFit {
  // Untruncated cumulative inverse probability of remaining uncensored,
  // indexed [arm][pattern][week].
  std::array<std::vector<std::vector<double>>, 2> w;
  double cap = std::numeric_limits<double>::infinity();
  double n_truncated = 0.0;
};

int last_at_risk(const Unit& u, int arm) {
  const int c = u.censor[static_cast<std::size_t>(arm)];
  if (c <= u.terminal_week) return c - 1;
  return u.terminal == Terminal::Censored ? u.terminal_week - 1 : u.terminal_week;
}

void add_note(std::vector<std::string>& notes, const std::string& msg) {
  if (std::find(notes.begin(), notes.end(), msg) == notes.end()) notes.push_back(msg);
}

CensorFit fit_censoring(const UnitSet& set, std::span<const double> counts, int grace, double truncation_quantile,
                        const std::array<std::string, 2>& arm_labels, std::vector<std::string>& notes) {
  const auto h = static_cast<std::size_t>(set.horizon) + 1;
  const auto np = set.patterns.size();
  CensorFit out;
  for (int arm = 0; arm < 2; ++arm) {
    std::vector<std::vector<double>> at_risk(np, std::vector<double>(h)), censored(np, std::vector<double>(h));
    for (std::size_t i = 0; i < set.units.size(); ++i) {
      const auto& u = set.units[i];
      if (counts[i] <= 0) continue;
      const int c = u.censor[static_cast<std::size_t>(arm)];
      const int last = std::min(u.terminal_week, c);
      for (int k = 0; k <= last; ++k) {
        if (k == u.terminal_week && u.terminal == Terminal::Censored && c > u.terminal_week) continue;
        at_risk[u.pattern][static_cast<std::size_t>(k)] += counts[i];
        if (k == c) censored[u.pattern][static_cast<std::size_t>(k)] += counts[i];
      }
    }
    std::vector<std::vector<double>> prob(np, std::vector<double>(h, 0.0));
    auto group_of = [&](std::size_t k) { return k == 0 ? 0 : (static_cast<int>(k) == grace + 1 ? 1 : 2); };
    const char* group_names[] = {"week 0", "first week after grace", "remaining weeks"};
    for (int g = 0; g < 3; ++g) {
      std::vector<std::vector<double>> rows, predict_rows;
      std::vector<std::pair<std::size_t, std::size_t>> predict_cells;
      std::vector<double> n, c;
      double n_tot = 0.0, c_tot = 0.0;
      for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t k = 0; k < h; ++k) {
          if (group_of(k) != g) continue;
          auto row = set.patterns[p];
          if (g == 2) row.push_back(static_cast<double>(k));
          predict_rows.push_back(row);
          predict_cells.emplace_back(p, k);
          if (at_risk[p][k] <= 0) continue;
          rows.push_back(row);
          n.push_back(at_risk[p][k]);
          c.push_back(censored[p][k]);
          n_tot += at_risk[p][k];
          c_tot += censored[p][k];
        }
      }
      if (rows.empty() || c_tot <= 0) continue;
      const std::string what = "censoring model (" + arm_labels[static_cast<std::size_t>(arm)] + ", " + group_names[g] + ")";
      if (c_tot >= n_tot) {
        add_note(notes, what + ": every clone censored, weights set to 1");
        continue;
      }
      const auto fitted = fit_cells(rows, n, c, predict_rows, what, notes, nullptr);
      for (std::size_t j = 0; j < predict_cells.size(); ++j)
        prob[predict_cells[j].first][predict_cells[j].second] = fitted[j];
    }
    auto& w = out.w[static_cast<std::size_t>(arm)];
    w.assign(np, std::vector<double>(h, 1.0));
    for (std::size_t p = 0; p < np; ++p) {
      double cum = 1.0;
      for (std::size_t k = 0; k < h; ++k) {
        cum /= 1.0 - std::min(prob[p][k], 1.0 - kPositivityEpsilon);
        w[p][k] = cum;
      }
    }
  }

  if (truncation_quantile < 1.0) {
    std::vector<std::vector<std::vector<double>>> mass(2, std::vector<std::vector<double>>(np, std::vector<double>(h)));
    for (std::size_t i = 0; i < set.units.size(); ++i) {
      if (counts[i] <= 0) continue;
      for (int arm = 0; arm < 2; ++arm)
        for (int k = 0; k <= last_at_risk(set.units[i], arm); ++k)
          mass[static_cast<std::size_t>(arm)][set.units[i].pattern][static_cast<std::size_t>(k)] += counts[i];
    }
    std::vector<std::pair<double, double>> cells;
    double total = 0.0;
    for (std::size_t arm = 0; arm < 2; ++arm)
      for (std::size_t p = 0; p < np; ++p)
        for (std::size_t k = 0; k < h; ++k)
          if (mass[arm][p][k] > 0) {
            cells.emplace_back(out.w[arm][p][k], mass[arm][p][k]);
            total += mass[arm][p][k];
          }
    std::sort(cells.begin(), cells.end());
    double cum = 0.0;
    for (const auto& [value, m] : cells) {
      cum += m;
      if (cum >= truncation_quantile * total) {
        out.cap = value;
        break;
      }
    }
    for (const auto& [value, m] : cells)
      if (value > out.cap) out.n_truncated += m;
  }
  return out;
}

std::array<double, 2> pp_risks(const UnitSet& set, std::span<const double> counts, const ProtocolSpec& protocol,
                               double truncation_quantile, std::vector<std::string>& notes, CensorFit* fit_out) {
  const std::array<std::string, 2> labels{protocol.strategies[0].label, protocol.strategies[1].label};
  auto fit = fit_censoring(set, counts, protocol.grace_period_weeks, truncation_quantile, labels, notes);
  std::array<double, 2> risk{};
  const auto h = static_cast<std::size_t>(set.horizon) + 1;
  for (int arm = 0; arm < 2; ++arm) {
    std::vector<double> n(h), dy(h), ds(h);
    const auto& w = fit.w[static_cast<std::size_t>(arm)];
    for (std::size_t i = 0; i < set.units.size(); ++i) {
      const auto& u = set.units[i];
      if (counts[i] <= 0) continue;
      const double cnt = counts[i];
      accumulate(u.terminal_week, u.terminal, u.censor[static_cast<std::size_t>(arm)],
                 [&](int k) { return cnt * std::min(w[u.pattern][static_cast<std::size_t>(k)], fit.cap); }, n, dy, ds);
    }
    if (n[0] <= 0) throw NumericalError("strategy '" + labels[static_cast<std::size_t>(arm)] + "' has no clones at risk");
    risk[static_cast<std::size_t>(arm)] = aalen_johansen(n, dy, ds).final_outcome();
  }
  if (fit_out) *fit_out = std::move(fit);
  return risk;
}

}  // namespace

CensorWeightReport censor_weights(const AnalyticCohort& cohort, std::vector<Clone>& clones,
                                  const CensorWeightOptions& options) {
  CensorWeightReport report;
  const auto set = make_units(cohort, options.covariates, false, report.notes);
  if (set.units.empty()) return report;
  const std::vector<double> counts(set.units.size(), 1.0);
  const std::array<std::string, 2> labels{cohort.protocol.strategies[0].label, cohort.protocol.strategies[1].label};
  const auto fit = fit_censoring(set, counts, cohort.protocol.grace_period_weeks, options.truncation_quantile, labels,
                                 report.notes);
  report.truncation_cap = fit.cap;
  report.n_truncated = static_cast<std::size_t>(fit.n_truncated);
  if (report.n_truncated > 0)
    report.notes.push_back("truncated " + std::to_string(report.n_truncated) + " clone-weeks at weight " +
                           std::to_string(fit.cap));
  for (auto& c : clones) {
    const auto& u = set.units[c.member];
    const int last = c.artificial_censor_week.value_or(u.terminal_week);
    c.ipc_weight.resize(static_cast<std::size_t>(last) + 1);
    for (int k = 0; k <= last; ++k)
      c.ipc_weight[static_cast<std::size_t>(k)] =
          std::min(fit.w[static_cast<std::size_t>(c.arm)][u.pattern][static_cast<std::size_t>(k)], fit.cap);
  }
  return report;
}

std::string_view to_string(OutcomeVariant v) {
  return v == OutcomeVariant::CauseSpecific ? "CAUSE_SPECIFIC" : "LOSS_OR_OUTCOME";
}

EffectResult estimate_effect(const AnalyticCohort& source, const EstimationOptions& options) {
  AnalyticCohort relabeled;
  if (options.outcome == OutcomeVariant::LossOrOutcome) {
    relabeled = source;
    for (auto& m : relabeled.members)
      if (m.terminal == Terminal::Competing) m.terminal = Terminal::Event;
  }
  const AnalyticCohort& cohort = options.outcome == OutcomeVariant::LossOrOutcome ? relabeled : source;
  const auto& protocol = cohort.protocol;
  const Contrast contrast = options.contrast.value_or(protocol.contrast);
  EffectResult result;
  result.label = std::string(to_string(cohort.design.anchor)) + "/" + protocol.name;
  if (cohort.members.empty()) throw NumericalError("cohort " + result.label + " has no members");

  const auto set = make_units(cohort, options.confounders.value_or(protocol.confounders), true, result.notes);
  std::vector<double> sizes;
  for (const auto& u : set.units) sizes.push_back(u.count);

  auto risks = [&](std::span<const double> counts, std::vector<std::string>& notes) {
    return contrast == Contrast::IttAnalog ? itt_risks(set, counts, options.stabilized, notes)
                                           : pp_risks(set, counts, protocol, options.truncation_quantile, notes, nullptr);
  };

  CensorFit point_fit;
  const auto point = contrast == Contrast::IttAnalog
                         ? itt_risks(set, sizes, options.stabilized, result.notes)
                         : pp_risks(set, sizes, protocol, options.truncation_quantile, result.notes, &point_fit);
  if (contrast == Contrast::PerProtocol && point_fit.n_truncated > 0)
    result.notes.push_back("truncated " + std::to_string(static_cast<long long>(point_fit.n_truncated)) +
                           " clone-weeks at weight " + std::to_string(point_fit.cap));
  result.risk_treated = point[0];
  result.risk_untreated = point[1];
  result.ratio_undefined = point[0] <= 0.0 || point[1] <= 0.0;
  if (result.ratio_undefined) result.notes.push_back("an arm has no outcome events; risk ratio undefined");

  std::vector<double> boot_rd, boot_rr;
  for (int b = 0; b < options.bootstrap; ++b) {
    const auto counts = multinomial_counts(sizes, derive_key(options.seed, 0xb0075eedULL, static_cast<std::uint64_t>(b)));
    std::vector<std::string> scratch;
    try {
      const auto r = risks(counts, scratch);
      boot_rd.push_back(r[0] - r[1]);
      if (r[1] > 0.0 && r[0] > 0.0) boot_rr.push_back(r[0] / r[1]);
    } catch (const Error&) {
      ++result.bootstrap_failures;
    }
  }
  if (result.bootstrap_failures > 0)
    result.notes.push_back(std::to_string(result.bootstrap_failures) + " bootstrap resamples failed and were skipped");

  std::size_t n_events = 0;
  for (const auto& m : cohort.members) n_events += m.terminal == Terminal::Event;
  const double alpha = (1.0 - options.ci_level) / 2.0;
  auto make = [&](Scale scale, double value, const std::vector<double>& boot) {
    EffectEstimate e;
    e.estimand = contrast;
    e.scale = scale;
    e.point = value;
    e.ci_low = boot.empty() ? value : std::min(value, quantile(boot, alpha));
    e.ci_high = boot.empty() ? value : std::max(value, quantile(boot, 1.0 - alpha));
    e.n_persons = cohort.members.size();
    e.n_events = n_events;
    e.method_tag = contrast == Contrast::IttAnalog ? (options.stabilized ? "ipw-stabilized-itt" : "ipw-itt") : "ccw-pp";
    if (options.outcome == OutcomeVariant::LossOrOutcome) e.method_tag += "+loss-or-outcome";
    return e;
  };
  result.risk_difference = make(Scale::RiskDifference, point[0] - point[1], boot_rd);
  if (!result.ratio_undefined) result.risk_ratio = make(Scale::RiskRatio, point[0] / point[1], boot_rr);
  result.immortal_person_weeks = immortal_time(cohort).total;
  return result;
}

}  // namespace pregtte
