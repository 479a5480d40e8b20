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

#include "pregtte/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pregtte/config_text.hpp"
#include "pregtte/errors.hpp"

namespace pregtte {

namespace {

constexpr std::string_view kStopOrGo =
    "# SSRI continuation for depression in remission; decision at the first prenatal visit.\n"
    "name = stop_or_go\n"
    "eligibility_window = 5..15\n"
    "eligibility = chronic_condition, current_use\n"
    "strategies = GO:continue, STOP:discontinue\n"
    "grace_period_weeks = 4\n"
    "stratify_by_prior_use = false\n"
    "followup_end = pregnancy_end + 12\n"
    "ltfu_gap_days = 60\n"
    "outcome = composite_outcome\n"
    "competing_event = pregnancy_loss\n"
    "contrast = PER_PROTOCOL\n"
    "confounders = treated_at_lmp, prepreg_user\n";

constexpr std::string_view kChap =
    "# Antihypertensives for mild chronic hypertension, stratified by use before pregnancy.\n"
    "name = chap\n"
    "eligibility_window = 14..22\n"
    "eligibility = chronic_condition\n"
    "strategies = TREAT:treat, NO_TREAT:no_treat\n"
    "grace_period_weeks = 4\n"
    "stratify_by_prior_use = true\n"
    "followup_end = pregnancy_end + 6\n"
    "ltfu_gap_days = 60\n"
    "outcome = composite_outcome\n"
    "competing_event = pregnancy_loss\n"
    "contrast = PER_PROTOCOL\n"
    "confounders = treated_at_lmp, prepreg_user\n";

const std::vector<std::string> kKnownConfounders = {"treated_at_lmp", "prepreg_user", "chronic_condition", "u_proxy"};

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Continue: return "continue";
    case StrategyKind::Discontinue: return "discontinue";
    case StrategyKind::Initiate: return "initiate";
    case StrategyKind::Withhold: return "withhold";
    case StrategyKind::Treat: return "treat";
    case StrategyKind::NoTreat: return "no_treat";
  }
  return "?";
}

StrategyKind parse_strategy_kind(std::string_view s) {
  for (auto k : {StrategyKind::Continue, StrategyKind::Discontinue, StrategyKind::Initiate, StrategyKind::Withhold,
                 StrategyKind::Treat, StrategyKind::NoTreat})
    if (to_string(k) == s) return k;
  throw ParameterError("unknown strategy kind '" + std::string(s) + "'");
}

bool is_treated_strategy(StrategyKind k) {
  return k == StrategyKind::Continue || k == StrategyKind::Initiate || k == StrategyKind::Treat;
}

std::string_view to_string(Contrast c) { return c == Contrast::IttAnalog ? "ITT_ANALOG" : "PER_PROTOCOL"; }

Contrast parse_contrast(std::string_view s) {
  if (s == "ITT_ANALOG") return Contrast::IttAnalog;
  if (s == "PER_PROTOCOL") return Contrast::PerProtocol;
  throw ParameterError("unknown contrast '" + std::string(s) + "' (ITT_ANALOG, PER_PROTOCOL)");
}

std::string_view to_string(EligibilityRule r) {
  return r == EligibilityRule::ChronicCondition ? "chronic_condition" : "current_use";
}

bool ProtocolSpec::has_rule(EligibilityRule r) const {
  return std::find(eligibility.begin(), eligibility.end(), r) != eligibility.end();
}

ProtocolSpec parse_protocol(std::string_view text, const std::string& source) {
  const auto doc = ConfigText::parse(text, source);
  ProtocolSpec p;
  p.eligibility.clear();
  auto required = [&](const char* key) -> const ConfigEntry& {
    const auto* e = doc.find(key);
    if (!e) throw SchemaError(source, 0, key, "required key missing");
    return *e;
  };

  required("name");
  p.name = *doc.get_string("name");
  if (p.name.empty() || p.name.find_first_of(" \t") != std::string::npos) doc.fail(required("name"), "name must be a single token");

  {
    const auto& e = required("eligibility_window");
    const auto v = *doc.get_string("eligibility_window");
    const auto dots = v.find("..");
    if (dots == std::string::npos) doc.fail(e, "expected 'first..last'");
    auto lo = parse_int(trim(std::string_view(v).substr(0, dots)));
    auto hi = parse_int(trim(std::string_view(v).substr(dots + 2)));
    if (!lo || !hi) doc.fail(e, "window bounds must be integers");
    if (*lo > *hi) doc.fail(e, "window first week exceeds last week");
    p.window_first_week = *lo;
    p.window_last_week = *hi;
  }

  if (auto rules = doc.get_list("eligibility")) {
    for (const auto& r : *rules) {
      if (r == "chronic_condition") p.eligibility.push_back(EligibilityRule::ChronicCondition);
      else if (r == "current_use") p.eligibility.push_back(EligibilityRule::CurrentUse);
      else doc.fail(*doc.find("eligibility"), "unknown eligibility rule '" + r + "'");
    }
  }

  {
    const auto& e = required("strategies");
    const auto items = *doc.get_list("strategies");
    if (items.size() != 2) doc.fail(e, "exactly two strategies required, got " + std::to_string(items.size()));
    for (std::size_t i = 0; i < 2; ++i) {
      const auto colon = items[i].find(':');
      if (colon == std::string::npos) doc.fail(e, "strategy must be LABEL:kind");
      Strategy s;
      s.label = trim(std::string_view(items[i]).substr(0, colon));
      if (s.label.empty()) doc.fail(e, "empty strategy label");
      try {
        s.kind = parse_strategy_kind(trim(std::string_view(items[i]).substr(colon + 1)));
      } catch (const ParameterError& err) {
        doc.fail(e, err.what());
      }
      p.strategies[i] = s;
    }
    if (!is_treated_strategy(p.strategies[0].kind) || is_treated_strategy(p.strategies[1].kind))
      doc.fail(e, "first strategy must be a treated strategy and second an untreated one");
    if (p.strategies[0].label == p.strategies[1].label) doc.fail(e, "strategy labels must differ");
  }

  if (auto g = doc.get_int("grace_period_weeks")) {
    if (*g < 0) doc.fail(*doc.find("grace_period_weeks"), "must be >= 0");
    p.grace_period_weeks = static_cast<int>(*g);
  }
  if (auto b = doc.get_bool("stratify_by_prior_use")) p.stratify_by_prior_use = *b;
  if (auto f = doc.get_string("followup_end")) {
    const auto& e = *doc.find("followup_end");
    const auto plus = f->find('+');
    if (plus == std::string::npos || trim(std::string_view(*f).substr(0, plus)) != "pregnancy_end")
      doc.fail(e, "expected 'pregnancy_end + <weeks>'");
    auto h = parse_int(trim(std::string_view(*f).substr(plus + 1)));
    if (!h || *h < 0) doc.fail(e, "horizon must be a non-negative integer");
    p.followup_horizon_weeks = *h;
  }
  if (auto g = doc.get_int("ltfu_gap_days")) {
    if (*g <= 0) doc.fail(*doc.find("ltfu_gap_days"), "must be > 0");
    p.ltfu_gap_days = static_cast<int>(*g);
  }
  if (auto o = doc.get_string("outcome")) {
    if (*o != "composite_outcome") doc.fail(*doc.find("outcome"), "unknown outcome '" + *o + "'");
    p.outcome = *o;
  }
  if (auto c = doc.get_string("competing_event")) {
    if (*c != "pregnancy_loss" && *c != "none") doc.fail(*doc.find("competing_event"), "expected pregnancy_loss or none");
    p.competing_event = *c;
  }
  if (auto c = doc.get_string("contrast")) {
    try {
      p.contrast = parse_contrast(*c);
    } catch (const ParameterError& err) {
      doc.fail(*doc.find("contrast"), err.what());
    }
  }
  if (auto c = doc.get_list("confounders")) {
    for (const auto& name : *c)
      if (std::find(kKnownConfounders.begin(), kKnownConfounders.end(), name) == kKnownConfounders.end())
        doc.fail(*doc.find("confounders"), "unknown confounder '" + name + "'");
    p.confounders = *c;
  }
  doc.reject_unused();
  return p;
}

ProtocolSpec load_protocol(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_protocol(buf.str(), path);
}

std::string serialize_protocol(const ProtocolSpec& p) {
  std::ostringstream out;
  out << "name = " << p.name << '\n';
  out << "eligibility_window = " << p.window_first_week << ".." << p.window_last_week << '\n';
  out << "eligibility = ";
  for (std::size_t i = 0; i < p.eligibility.size(); ++i) out << (i ? ", " : "") << to_string(p.eligibility[i]);
  out << '\n';
  out << "strategies = " << p.strategies[0].label << ':' << to_string(p.strategies[0].kind) << ", "
      << p.strategies[1].label << ':' << to_string(p.strategies[1].kind) << '\n';
  out << "grace_period_weeks = " << p.grace_period_weeks << '\n';
  out << "stratify_by_prior_use = " << (p.stratify_by_prior_use ? "true" : "false") << '\n';
  out << "followup_end = pregnancy_end + " << p.followup_horizon_weeks << '\n';
  out << "ltfu_gap_days = " << p.ltfu_gap_days << '\n';
  out << "outcome = " << p.outcome << '\n';
  out << "competing_event = " << p.competing_event << '\n';
  out << "contrast = " << to_string(p.contrast) << '\n';
  out << "confounders = ";
  for (std::size_t i = 0; i < p.confounders.size(); ++i) out << (i ? ", " : "") << p.confounders[i];
  out << '\n';
  return out.str();
}

std::string shipped_protocol_text(std::string_view name) {
  if (name == "stop_or_go") return std::string(kStopOrGo);
  if (name == "chap") return std::string(kChap);
  throw PreconditionError("unknown protocol '" + std::string(name) + "' (stop_or_go, chap)");
}

ProtocolSpec shipped_protocol(std::string_view name) {
  return parse_protocol(shipped_protocol_text(name), std::string(name) + ".protocol");
}

ProtocolSpec resolve_protocol(const std::string& name_or_path) {
  if (name_or_path == "stop_or_go" || name_or_path == "chap") return shipped_protocol(name_or_path);
  return load_protocol(name_or_path);
}

}  // namespace pregtte
