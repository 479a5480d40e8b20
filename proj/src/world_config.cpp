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

#include "pregtte/world_config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "pregtte/errors.hpp"
#include "pregtte/oracle.hpp"
#include "pregtte/protocol.hpp"

namespace pregtte {

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct ScenarioRef {
  Scenario& value;
};
struct WeightsRef {
  std::array<double, kRecognitionWeeks>& value;
};
struct ListRef {
  std::vector<std::string>& value;
};

// Calls f(key, ref) for every world and observation field in canonical order.
template <class F>
void visit_world(WorldParams& w, ObservationParams& o, F&& f) {
  f("scenario", ScenarioRef{w.scenario});
  f("n_persons", w.n_persons);
  f("seed", w.seed);
  f("coef.u_on_y", w.coef_u_on_y);
  f("coef.u_on_s", w.coef_u_on_s);
  f("coef.u_on_a0", w.coef_u_on_a0);
  f("coef.u_on_a1", w.coef_u_on_a1);
  f("coef.a0_on_a1", w.coef_a0_on_a1);
  f("coef.a0_on_y", w.coef_a0_on_y);
  f("coef.a1_on_y", w.coef_a1_on_y);
  f("coef.a0_on_s", w.coef_a0_on_s);
  f("coef.prepreg_on_a0", w.coef_prepreg_on_a0);
  f("coef.susceptible_on_y", w.coef_susceptible_on_y);
  f("coef.susceptible_treated_on_y", w.coef_susceptible_treated_on_y);
  f("coef.a0_on_stop", w.coef_a0_on_stop);
  f("intercept_a0", w.intercept_a0);
  f("intercept_a1", w.intercept_a1);
  f("baseline_loss_hazard", w.baseline_loss_hazard);
  f("baseline_outcome_risk", w.baseline_outcome_risk);
  f("post_decision_stop_hazard", w.post_decision_stop_hazard);
  f("loss_window_last_week", w.loss_window_last_week);
  f("term_week_min", w.term_week_min);
  f("term_week_max", w.term_week_max);
  f("a1_default_week", w.a1_default_week);
  f("prepreg.p_chronic_condition", w.prepreg.p_chronic_condition);
  f("prepreg.p_susceptible", w.prepreg.p_susceptible);
  f("prepreg.p_initiate_per_month", w.prepreg.p_initiate_per_month);
  f("prepreg.p_adverse_event_on_initiation", w.prepreg.p_adverse_event_on_initiation);
  f("prepreg.p_discontinue_given_adverse", w.prepreg.p_discontinue_given_adverse);
  f("prepreg.months_lookback", w.prepreg.months_lookback);
  f("encounters.p_preconception_visit", w.encounters.p_preconception_visit);
  f("encounters.recognition_weights", WeightsRef{w.encounters.recognition_weights});
  f("encounters.p_late_prenatal_after_week12", w.encounters.p_late_prenatal_after_week12);
  f("encounters.p_no_prenatal_care", w.encounters.p_no_prenatal_care);
  f("encounters.early_visit_first_week", w.encounters.early_visit_first_week);
  f("encounters.late_visit_last_week", w.encounters.late_visit_last_week);
  f("encounters.visit_interval_weeks", w.encounters.visit_interval_weeks);
  f("encounters.preconception_earliest_week", w.encounters.preconception_earliest_week);
  f("encounters.p_loss_recorded", w.encounters.p_loss_recorded);
  f("observation.claims_lookback_weeks", o.claims_lookback_weeks);
  f("observation.u_proxy_correlation", o.u_proxy_correlation);
}

template <class F>
void visit_experiment(ExperimentConfig& c, F&& f) {
  visit_world(c.world, c.observation, f);
  f("experiment.protocol", c.protocol);
  f("experiment.designs", ListRef{c.designs});
  f("experiment.repeats", c.repeats);
  f("experiment.bootstrap", c.bootstrap);
  f("experiment.oracle_draws", c.oracle_draws);
  f("experiment.estimand", c.estimand);
  f("experiment.population", c.population);
  f("experiment.contrast", c.contrast);
}

struct Reader {
  const ConfigText& doc;

  void operator()(const char* key, ScenarioRef r) const {
    if (auto v = doc.get_string(key)) {
      try {
        r.value = parse_scenario(*v);
      } catch (const ParameterError& e) {
        doc.fail(*doc.find(key), e.what());
      }
    }
  }
  void operator()(const char* key, double& v) const {
    if (auto x = doc.get_real(key)) v = *x;
  }
  void operator()(const char* key, int& v) const {
    if (auto x = doc.get_int(key)) v = static_cast<int>(*x);
  }
  void operator()(const char* key, std::uint64_t& v) const {
    if (auto x = doc.get_int(key)) {
      if (*x < 0) doc.fail(*doc.find(key), "must be non-negative");
      v = static_cast<std::uint64_t>(*x);
    }
  }
  void operator()(const char* key, std::string& v) const {
    if (auto x = doc.get_string(key)) v = *x;
  }
  void operator()(const char* key, ListRef r) const {
    if (auto x = doc.get_list(key)) r.value = *x;
  }
  void operator()(const char* key, WeightsRef r) const {
    auto items = doc.get_list(key);
    if (!items) return;
    if (items->size() != kRecognitionWeeks)
      doc.fail(*doc.find(key), "expected " + std::to_string(kRecognitionWeeks) + " weights (weeks 4..20)");
    for (std::size_t i = 0; i < kRecognitionWeeks; ++i) {
      double x = 0;
      const auto& s = (*items)[i];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
      if (ec != std::errc() || ptr != s.data() + s.size()) doc.fail(*doc.find(key), "bad weight '" + s + "'");
      r.value[i] = x;
    }
  }
};

struct Writer {
  std::ostringstream& out;

  void operator()(const char* key, ScenarioRef r) const { out << key << " = " << to_string(r.value) << '\n'; }
  void operator()(const char* key, double& v) const { out << key << " = " << format_real(v) << '\n'; }
  void operator()(const char* key, int& v) const { out << key << " = " << v << '\n'; }
  void operator()(const char* key, std::uint64_t& v) const { out << key << " = " << v << '\n'; }
  void operator()(const char* key, std::string& v) const { out << key << " = " << v << '\n'; }
  void operator()(const char* key, ListRef r) const {
    out << key << " = ";
    for (std::size_t i = 0; i < r.value.size(); ++i) out << (i ? ", " : "") << r.value[i];
    out << '\n';
  }
  void operator()(const char* key, WeightsRef r) const {
    out << key << " = ";
    for (std::size_t i = 0; i < r.value.size(); ++i) out << (i ? ", " : "") << format_real(r.value[i]);
    out << '\n';
  }
};

}  // namespace

ExperimentConfig experiment_from_preset(std::string_view preset_name) {
  ExperimentConfig c;
  c.world = preset(preset_name);
  if (preset_name == "prevalent_user") {
    c.protocol = "chap";
    c.designs = {"4D"};
  }
  return c;
}

ExperimentConfig parse_experiment(const ConfigText& doc) {
  ExperimentConfig c;
  if (auto name = doc.get_string("preset")) {
    try {
      c = experiment_from_preset(*name);
    } catch (const ParameterError& e) {
      doc.fail(*doc.find("preset"), e.what());
    }
  } else {
    c.world.encounters = default_encounter_params();
  }
  visit_experiment(c, Reader{doc});
  doc.reject_unused();
  const auto where = [&](const char* key) {
    const auto* e = doc.find(key);
    return doc.source() + (e ? ":" + std::to_string(e->line) : std::string()) + ": '" + key + "': ";
  };
  try {
    validate(c.world);
  } catch (const ParameterError& e) {
    throw ParameterError(doc.source() + ": " + e.what());
  }
  if (c.observation.claims_lookback_weeks < 0)
    throw ParameterError(where("observation.claims_lookback_weeks") + "must be >= 0");
  if (!(c.observation.u_proxy_correlation >= -1.0 && c.observation.u_proxy_correlation <= 1.0))
    throw ParameterError(where("observation.u_proxy_correlation") + "must lie in [-1,1]");
  if (c.repeats < 0) throw ParameterError(where("experiment.repeats") + "must be >= 0");
  if (c.bootstrap < 0) throw ParameterError(where("experiment.bootstrap") + "must be >= 0");
  // Enumerated names are a schema matter: an unknown name is a malformed file.
  const auto check_name = [&](const char* key, auto parse) {
    try {
      parse();
    } catch (const Error& e) {
      const auto* entry = doc.find(key);
      throw SchemaError(doc.source(), entry ? entry->line : 0, key, e.what());
    }
  };
  check_name("experiment.estimand", [&] { parse_oracle_kind(c.estimand); });
  check_name("experiment.population", [&] { parse_target_population(c.population); });
  if (c.contrast != "protocol") check_name("experiment.contrast", [&] { parse_contrast(c.contrast); });
  return c;
}

ExperimentConfig load_experiment(const std::string& path) { return parse_experiment(ConfigText::load(path)); }

std::string canonical_text(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  std::ostringstream out;
  visit_experiment(copy, Writer{out});
  return out.str();
}

std::string canonical_world_text(const WorldParams& world, const ObservationParams& observation) {
  WorldParams w = world;
  ObservationParams o = observation;
  std::ostringstream out;
  visit_world(w, o, Writer{out});
  return out.str();
}

std::string params_digest(const WorldParams& world, const ObservationParams& observation) {
  return digest_hex(canonical_world_text(world, observation));
}

}  // namespace pregtte
