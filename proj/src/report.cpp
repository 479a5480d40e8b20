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

#include "pregtte/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pregtte/world_config.hpp"

namespace pregtte {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string join_set(const NodeSet& s) {
  std::string out = "{";
  for (const auto& v : s) out += (out.size() > 1 ? "," : "") + v;
  return out + "}";
}

/// JSON numbers with round-trip precision; non-finite values become null.
ordered_json num(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json estimate_json(const EffectEstimate& e) {
  ordered_json j;
  j["estimand"] = to_string(e.estimand);
  j["scale"] = to_string(e.scale);
  j["point"] = num(e.point);
  j["ci_low"] = num(e.ci_low);
  j["ci_high"] = num(e.ci_high);
  j["n_persons"] = e.n_persons;
  j["n_events"] = e.n_events;
  j["method_tag"] = e.method_tag;
  j["oracle_truth"] = e.oracle_truth ? num(*e.oracle_truth) : ordered_json(nullptr);
  j["bias"] = e.bias ? num(*e.bias) : ordered_json(nullptr);
  return j;
}

void estimate_row(std::ostringstream& out, const std::string& label, const EffectEstimate& e, long long immortal) {
  out << pad(label, 22) << pad(std::string(to_string(e.scale)), 16) << pad(fixed6(e.point), 11)
      << pad(fixed6(e.ci_low), 11) << pad(fixed6(e.ci_high), 11) << pad(std::to_string(e.n_persons), 10)
      << pad(std::to_string(e.n_events), 9) << pad(e.method_tag, 24) << immortal << '\n';
}

}  // namespace

std::string fixed6(double x) {
  if (!std::isfinite(x)) return "NA";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  // Avoid printing "-0.000000".
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string format_identify_table(const std::string& graph_name, const std::vector<IdentifiabilityVerdict>& verdicts) {
  std::ostringstream out;
  out << "graph: " << graph_name << '\n';
  out << pad("estimand", 10) << pad("identifiable", 14) << pad("adjustment_set", 18) << "open_path\n";
  for (const auto& v : verdicts) {
    out << pad(std::string(to_string(v.estimand)), 10) << pad(v.identifiable ? "yes" : "no", 14)
        << pad(v.witness ? join_set(*v.witness) : "-", 18) << (v.open_path_text.empty() ? "-" : v.open_path_text)
        << '\n';
  }
  return out.str();
}

std::string identify_json(const std::string& graph_name, const std::vector<IdentifiabilityVerdict>& verdicts) {
  ordered_json j;
  j["graph"] = graph_name;
  ordered_json rows = ordered_json::array();
  for (const auto& v : verdicts) {
    ordered_json r;
    r["estimand"] = to_string(v.estimand);
    r["identifiable"] = v.identifiable;
    r["adjustment_set"] = v.witness ? ordered_json(std::vector<std::string>(v.witness->begin(), v.witness->end()))
                                    : ordered_json(nullptr);
    r["open_path"] = v.open_path ? ordered_json(*v.open_path) : ordered_json(nullptr);
    rows.push_back(r);
  }
  j["verdicts"] = rows;
  return j.dump(2) + "\n";
}

std::string format_estimates(const std::vector<EffectResult>& results) {
  std::ostringstream out;
  out << pad("label", 22) << pad("scale", 16) << pad("point", 11) << pad("ci_low", 11) << pad("ci_high", 11)
      << pad("n_persons", 10) << pad("n_events", 9) << pad("method", 24) << "immortal_pw\n";
  for (const auto& r : results) {
    estimate_row(out, r.label, r.risk_difference, r.immortal_person_weeks);
    if (r.risk_ratio) estimate_row(out, r.label, *r.risk_ratio, r.immortal_person_weeks);
    else out << pad(r.label, 22) << pad("RISK_RATIO", 16) << "undefined (an arm has no events)\n";
  }
  for (const auto& r : results) {
    out << r.label << ": risk_treated " << fixed6(r.risk_treated) << ", risk_untreated " << fixed6(r.risk_untreated);
    if (r.bootstrap_failures > 0) out << ", bootstrap_failures " << r.bootstrap_failures;
    out << '\n';
    for (const auto& n : r.notes) out << "  note: " << n << '\n';
  }
  return out.str();
}

std::string estimates_json(const std::vector<EffectResult>& results) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    ordered_json j;
    j["label"] = r.label;
    j["risk_difference"] = estimate_json(r.risk_difference);
    j["risk_ratio"] = r.risk_ratio ? estimate_json(*r.risk_ratio) : ordered_json(nullptr);
    j["ratio_undefined"] = r.ratio_undefined;
    j["risk_treated"] = num(r.risk_treated);
    j["risk_untreated"] = num(r.risk_untreated);
    j["immortal_person_weeks"] = r.immortal_person_weeks;
    j["bootstrap_failures"] = r.bootstrap_failures;
    j["notes"] = r.notes;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::string format_bias_table(const BiasTable& t) {
  std::ostringstream out;
  out << "estimand: " << to_string(t.estimand.kind) << " over " << to_string(t.estimand.population) << '\n';
  out << "truth: " << fixed6(t.truth.truth) << " (mc_se " << fixed6(t.truth.mc_se) << ", draws " << t.truth.draws
      << ")\n";
  out << pad("design", 8) << pad("repeats", 9) << pad("mean_est", 11) << pad("bias", 11) << pad("emp_se", 11)
      << pad("bias/se", 9) << pad("coverage", 10) << pad("immortal_pw", 13) << "mean_n\n";
  for (const auto& r : t.rows) {
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.2f", r.empirical_se > 0 ? r.bias / r.empirical_se : 0.0);
    char imm[32], n[32];
    std::snprintf(imm, sizeof imm, "%.1f", r.mean_immortal_weeks);
    std::snprintf(n, sizeof n, "%.1f", r.mean_cohort_size);
    out << pad(r.design, 8) << pad(std::to_string(r.repeats), 9) << pad(fixed6(r.mean_estimate), 11)
        << pad(fixed6(r.bias), 11) << pad(fixed6(r.empirical_se), 11) << pad(ratio, 9)
        << pad(r.coverage ? fixed6(*r.coverage) : "-", 10) << pad(imm, 13) << n << '\n';
  }
  return out.str();
}

std::string bias_json(const BiasTable& t) {
  ordered_json j;
  j["estimand"] = to_string(t.estimand.kind);
  j["population"] = to_string(t.estimand.population);
  j["truth"] = num(t.truth.truth);
  j["truth_mc_se"] = num(t.truth.mc_se);
  j["truth_draws"] = t.truth.draws;
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json x;
    x["design"] = r.design;
    x["repeats"] = r.repeats;
    x["mean_estimate"] = num(r.mean_estimate);
    x["bias"] = num(r.bias);
    x["empirical_se"] = num(r.empirical_se);
    x["coverage"] = r.coverage ? num(*r.coverage) : ordered_json(nullptr);
    x["mean_immortal_person_weeks"] = num(r.mean_immortal_weeks);
    x["mean_cohort_size"] = num(r.mean_cohort_size);
    rows.push_back(x);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string bias_long_tsv(const BiasTable& t) {
  std::ostringstream out;
  out << "# schema: bias_long/1\n";
  out << "design\trepeat\tquantity\tvalue\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.estimates.size(); ++i)
      out << r.design << '\t' << i << "\testimate\t" << format_real(r.estimates[i]) << '\n';
    out << r.design << "\tNA\ttruth\t" << format_real(t.truth.truth) << '\n';
    out << r.design << "\tNA\tbias\t" << format_real(r.bias) << '\n';
    out << r.design << "\tNA\tempirical_se\t" << format_real(r.empirical_se) << '\n';
  }
  return out.str();
}

DatasetSummary summarize_dataset(std::span<const Trajectory> trajectories, std::span<const ObservedRecord> observed) {
  DatasetSummary s;
  s.trajectories = trajectories.size();
  s.observed = observed.size();
  for (const auto& t : trajectories) {
    if (t.lost()) ++s.losses;
    else ++s.live_births;
    if (t.composite_outcome()) ++s.outcomes;
    if (t.a0) ++s.treated_a0;
    if (t.a1) ++s.treated_a1;
    const auto first = t.first_prenatal_visit();
    if (!first) ++s.no_prenatal_visit;
    else if (*first > 12) ++s.first_visit_after_week12;
    for (const auto& e : t.encounters)
      if (e.kind == EncounterKind::PreconceptionCounseling) ++s.preconception_visits;
  }
  for (const auto& r : observed) {
    if (!r.observed_end) continue;
    ++s.observed_ends;
    if (r.observed_end->type == EndType::Loss) ++s.observed_losses;
  }
  return s;
}

namespace {

template <class F>
void visit_summary(const DatasetSummary& s, F&& f) {
  f("trajectories", s.trajectories);
  f("observed", s.observed);
  f("losses", s.losses);
  f("observed_losses", s.observed_losses);
  f("live_births", s.live_births);
  f("outcomes", s.outcomes);
  f("treated_a0", s.treated_a0);
  f("treated_a1", s.treated_a1);
  f("no_prenatal_visit", s.no_prenatal_visit);
  f("first_visit_after_week12", s.first_visit_after_week12);
  f("preconception_visits", s.preconception_visits);
  f("observed_ends", s.observed_ends);
}

}  // namespace

std::string format_dataset_summary(const DatasetSummary& s) {
  std::ostringstream out;
  visit_summary(s, [&](const char* key, std::size_t v) { out << pad(key, 26) << v << '\n'; });
  return out.str();
}

std::string dataset_summary_json(const DatasetSummary& s) {
  ordered_json j;
  visit_summary(s, [&](const char* key, std::size_t v) { j[key] = v; });
  return j.dump(2) + "\n";
}

}  // namespace pregtte
