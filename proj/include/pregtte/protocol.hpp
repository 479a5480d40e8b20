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

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace pregtte {

/// What a strategy asks of a person after the anchor. `Treat` and `NoTreat`
/// resolve per person: continue/initiate and discontinue/withhold depending on
/// whether the person is on treatment at the anchor.
enum class StrategyKind { Continue, Discontinue, Initiate, Withhold, Treat, NoTreat };
std::string_view to_string(StrategyKind k);
StrategyKind parse_strategy_kind(std::string_view s);
bool is_treated_strategy(StrategyKind k);

struct Strategy {
  std::string label;
  StrategyKind kind = StrategyKind::Continue;
  bool operator==(const Strategy&) const = default;
};

enum class Contrast { IttAnalog, PerProtocol };
std::string_view to_string(Contrast c);
Contrast parse_contrast(std::string_view s);

/// Eligibility predicates evaluated with information available at the anchor.
enum class EligibilityRule { ChronicCondition, CurrentUse };
std::string_view to_string(EligibilityRule r);

struct ProtocolSpec {
  std::string name;
  /// Inclusive gestational-week range in which the anchor must fall.
  int window_first_week = 0;
  int window_last_week = 0;
  std::vector<EligibilityRule> eligibility;
  /// strategies[0] is the treated arm, strategies[1] the untreated arm.
  std::array<Strategy, 2> strategies;
  int grace_period_weeks = 4;
  bool stratify_by_prior_use = false;
  /// Follow-up ends this many weeks after the end of pregnancy.
  int followup_horizon_weeks = 12;
  int ltfu_gap_days = 60;
  std::string outcome = "composite_outcome";
  std::string competing_event = "pregnancy_loss";
  Contrast contrast = Contrast::PerProtocol;
  /// Baseline covariates for the propensity and censoring models.
  std::vector<std::string> confounders = {"treated_at_lmp", "prepreg_user"};

  bool has_rule(EligibilityRule r) const;
  /// Weeks without contact after which a person is lost to follow-up.
  int ltfu_gap_weeks() const { return ltfu_gap_days / 7 + 1; }
  bool operator==(const ProtocolSpec&) const = default;
};

/// Parses the `key = value` protocol schema (docs/formats.md). Throws
/// SchemaError with line and field on any violation.
ProtocolSpec parse_protocol(std::string_view text, const std::string& source = "<protocol>");
ProtocolSpec load_protocol(const std::string& path);
/// Canonical text; parse_protocol(serialize_protocol(p)) == p.
std::string serialize_protocol(const ProtocolSpec& p);

/// Shipped protocols: "stop_or_go" and "chap".
ProtocolSpec shipped_protocol(std::string_view name);
std::string shipped_protocol_text(std::string_view name);
/// A shipped name or a path to a protocol file.
ProtocolSpec resolve_protocol(const std::string& name_or_path);

}  // namespace pregtte
