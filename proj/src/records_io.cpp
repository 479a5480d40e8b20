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

#include "pregtte/records_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "pregtte/config_text.hpp"
#include "pregtte/errors.hpp"
#include "pregtte/world_config.hpp"

namespace pregtte {
namespace {

namespace fs = std::filesystem;

constexpr const char* kNa = "NA";

const std::vector<std::string> kTrajectoryColumns = {
    "person_id", "u", "proxy_noise", "chronic_condition", "susceptible", "prepreg_user", "prepreg_discontinued",
    "prepreg_start_week", "prepreg_stop_week", "a0", "a1", "a1_week", "stop_week", "in_system", "s_event",
    "end_week", "y"};
const std::vector<std::string> kEncounterColumns = {"person_id", "kind", "week", "recorded"};
const std::vector<std::string> kObservedColumns = {
    "person_id", "first_pregnancy_contact_week", "chronic_condition", "prepreg_user", "u_proxy",
    "end_week", "end_type", "outcome", "claims_first_week", "claims"};
const std::vector<std::string> kObservedEncounterColumns = {"person_id", "kind", "week"};

void write_preamble(std::ostream& out, const char* schema, const std::vector<std::string>& columns) {
  out << "# schema: " << schema << "/1\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "\t" : "") << columns[i];
  out << '\n';
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return kNa;
  if constexpr (std::is_same_v<T, bool>) return *v ? "1" : "0";
  else return std::to_string(*v);
}

/// Line-by-line TSV cursor that checks the schema line and header.
class TsvReader {
 public:
  TsvReader(std::istream& in, std::string source, const char* schema, const std::vector<std::string>& columns)
      : in_(in), source_(std::move(source)), columns_(columns) {
    std::string line;
    if (!next_line(line) || line != std::string("# schema: ") + schema + "/1")
      fail("", std::string("expected '# schema: ") + schema + "/1'");
    if (!next_line(line)) fail("", "missing header row");
    if (split(line, '\t') != columns) fail("", "header does not match schema " + std::string(schema));
  }

  bool next() {
    std::string line;
    while (next_line(line)) {
      if (line.empty()) continue;
      fields_ = split(line, '\t');
      if (fields_.size() != columns_.size())
        fail("", "expected " + std::to_string(columns_.size()) + " fields, found " + std::to_string(fields_.size()));
      return true;
    }
    return false;
  }

  const std::string& raw(std::size_t i) const { return fields_[i]; }
  bool is_na(std::size_t i) const { return fields_[i] == kNa; }

  template <class T>
  T integer(std::size_t i) const {
    T v{};
    const auto& s = fields_[i];
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(columns_[i], "not an integer: '" + s + "'");
    return v;
  }
  double real(std::size_t i) const {
    double v = 0;
    const auto& s = fields_[i];
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(columns_[i], "not a number: '" + s + "'");
    return v;
  }
  bool flag(std::size_t i) const {
    if (fields_[i] == "1") return true;
    if (fields_[i] == "0") return false;
    fail(columns_[i], "expected 0 or 1, found '" + fields_[i] + "'");
  }
  template <class T>
  std::optional<T> optional_integer(std::size_t i) const {
    if (is_na(i)) return std::nullopt;
    return integer<T>(i);
  }
  std::optional<bool> optional_flag(std::size_t i) const {
    if (is_na(i)) return std::nullopt;
    return flag(i);
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw SchemaError(source_, line_, field, what);
  }

 private:
  bool next_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::istream& in_;
  std::string source_;
  const std::vector<std::string>& columns_;
  std::vector<std::string> fields_;
  int line_ = 0;
};

/// Reads `person_id kind week [recorded]` rows and hands each to `sink`.
template <class Sink>
void read_encounter_rows(TsvReader& r, bool with_recorded, Sink sink) {
  while (r.next()) {
    Encounter e;
    try {
      e.kind = parse_encounter_kind(r.raw(1));
    } catch (const ParameterError& err) {
      r.fail("kind", err.what());
    }
    e.week = r.integer<int>(2);
    e.recorded = with_recorded ? r.flag(3) : true;
    sink(r.integer<std::uint64_t>(0), e);
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

void write_trajectories(std::ostream& out, std::span<const Trajectory> trajectories) {
  write_preamble(out, "trajectory", kTrajectoryColumns);
  for (const auto& t : trajectories) {
    out << t.person_id << '\t' << format_real(t.u) << '\t' << format_real(t.proxy_noise) << '\t'
        << t.chronic_condition << '\t' << t.susceptible << '\t' << t.prepreg_user << '\t' << t.prepreg_discontinued
        << '\t' << t.prepreg_start_week << '\t' << t.prepreg_stop_week << '\t' << t.a0 << '\t' << t.a1 << '\t'
        << t.a1_week << '\t' << opt(t.stop_week) << '\t' << t.in_system << '\t' << opt(t.s_event) << '\t'
        << t.end_week << '\t' << opt(t.y) << '\n';
  }
}

void write_encounters(std::ostream& out, std::span<const Trajectory> trajectories) {
  write_preamble(out, "encounter", kEncounterColumns);
  for (const auto& t : trajectories)
    for (const auto& e : t.encounters)
      out << t.person_id << '\t' << to_string(e.kind) << '\t' << e.week << '\t' << e.recorded << '\n';
}

void write_observed_records(std::ostream& out, std::span<const ObservedRecord> records) {
  write_preamble(out, "observed_record", kObservedColumns);
  for (const auto& r : records) {
    out << r.person_id << '\t' << r.first_pregnancy_contact_week << '\t' << format_real(r.covariate(kCovChronic))
        << '\t' << format_real(r.covariate(kCovPrepregUser)) << '\t' << format_real(r.covariate(kCovUProxy)) << '\t';
    if (r.observed_end)
      out << r.observed_end->week << '\t' << to_string(r.observed_end->type);
    else
      out << kNa << '\t' << kNa;
    out << '\t' << opt(r.observed_outcome) << '\t';
    if (r.treatment_claims.empty()) {
      out << kNa << '\t' << kNa;
    } else {
      out << r.treatment_claims.front().week << '\t';
      for (const auto& c : r.treatment_claims) out << (c.on_treatment ? '1' : '0');
    }
    out << '\n';
  }
}

void write_observed_encounters(std::ostream& out, std::span<const ObservedRecord> records) {
  write_preamble(out, "observed_encounter", kObservedEncounterColumns);
  for (const auto& r : records)
    for (const auto& e : r.visible_encounters) out << r.person_id << '\t' << to_string(e.kind) << '\t' << e.week << '\n';
}

std::vector<Trajectory> read_trajectories(std::istream& persons, const std::string& persons_source,
                                          std::istream& encounters, const std::string& encounters_source) {
  std::vector<Trajectory> out;
  std::map<std::uint64_t, std::size_t> index;
  TsvReader r(persons, persons_source, "trajectory", kTrajectoryColumns);
  while (r.next()) {
    Trajectory t;
    t.person_id = r.integer<std::uint64_t>(0);
    t.u = r.real(1);
    t.proxy_noise = r.real(2);
    t.chronic_condition = r.flag(3);
    t.susceptible = r.flag(4);
    t.prepreg_user = r.flag(5);
    t.prepreg_discontinued = r.flag(6);
    t.prepreg_start_week = r.integer<int>(7);
    t.prepreg_stop_week = r.integer<int>(8);
    t.a0 = r.flag(9);
    t.a1 = r.flag(10);
    t.a1_week = r.integer<int>(11);
    t.stop_week = r.optional_integer<int>(12);
    t.in_system = r.flag(13);
    t.s_event = r.optional_integer<int>(14);
    t.end_week = r.integer<int>(15);
    t.y = r.optional_flag(16);
    if (!index.emplace(t.person_id, out.size()).second) r.fail("person_id", "duplicate person");
    out.push_back(std::move(t));
  }
  TsvReader e(encounters, encounters_source, "encounter", kEncounterColumns);
  read_encounter_rows(e, true, [&](std::uint64_t id, const Encounter& enc) {
    const auto it = index.find(id);
    if (it == index.end()) e.fail("person_id", "encounter for unknown person " + std::to_string(id));
    out[it->second].encounters.push_back(enc);
  });
  return out;
}

std::vector<ObservedRecord> read_observed(std::istream& records, const std::string& records_source,
                                          std::istream& encounters, const std::string& encounters_source) {
  std::vector<ObservedRecord> out;
  std::map<std::uint64_t, std::size_t> index;
  TsvReader r(records, records_source, "observed_record", kObservedColumns);
  while (r.next()) {
    ObservedRecord rec;
    rec.person_id = r.integer<std::uint64_t>(0);
    rec.first_pregnancy_contact_week = r.integer<int>(1);
    rec.baseline_covariates[kCovChronic] = r.real(2);
    rec.baseline_covariates[kCovPrepregUser] = r.real(3);
    rec.baseline_covariates[kCovUProxy] = r.real(4);
    if (r.is_na(5) != r.is_na(6)) r.fail("end_type", "end_week and end_type must both be present or both NA");
    if (!r.is_na(5)) {
      ObservedEnd end;
      end.week = r.integer<int>(5);
      if (r.raw(6) == "LIVE_BIRTH") end.type = EndType::LiveBirth;
      else if (r.raw(6) == "LOSS") end.type = EndType::Loss;
      else r.fail("end_type", "expected LIVE_BIRTH or LOSS, found '" + r.raw(6) + "'");
      rec.observed_end = end;
    }
    rec.observed_outcome = r.optional_flag(7);
    if (r.is_na(8) != r.is_na(9)) r.fail("claims", "claims_first_week and claims must both be present or both NA");
    if (!r.is_na(8)) {
      int week = r.integer<int>(8);
      for (char c : r.raw(9)) {
        if (c != '0' && c != '1') r.fail("claims", "claims must be a string of 0/1 characters");
        rec.treatment_claims.push_back({week++, c == '1'});
      }
    }
    if (!index.emplace(rec.person_id, out.size()).second) r.fail("person_id", "duplicate person");
    out.push_back(std::move(rec));
  }
  TsvReader e(encounters, encounters_source, "observed_encounter", kObservedEncounterColumns);
  read_encounter_rows(e, false, [&](std::uint64_t id, const Encounter& enc) {
    const auto it = index.find(id);
    if (it == index.end()) e.fail("person_id", "encounter for unknown person " + std::to_string(id));
    out[it->second].visible_encounters.push_back(enc);
  });
  return out;
}

void write_cohort_rows(std::ostream& out, const AnalyticCohort& cohort) {
  out << "# schema: person_week/1\n"
      << "person_id\tweek_since_t0\tassigned_treated\ton_treatment\tevent\tcompeting_event\tcensored\n";
  for (const auto& w : cohort.rows())
    out << w.person_id << '\t' << w.week_since_t0 << '\t' << w.assigned_treated << '\t' << w.on_treatment << '\t'
        << w.event << '\t' << w.competing_event << '\t' << w.censored << '\n';
}

std::string read_text_file(const fs::path& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& content, bool force) {
  if (!force && fs::exists(path)) throw IoError("refusing to overwrite '" + path.string() + "' (use --force)");
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<Trajectory> load_trajectories(const fs::path& dir) {
  const auto persons = dir / kTrajectoriesFile;
  const auto encounters = dir / kEncountersFile;
  auto p = open_input(persons);
  auto e = open_input(encounters);
  return read_trajectories(p, persons.string(), e, encounters.string());
}

std::vector<ObservedRecord> load_observed(const fs::path& dir) {
  const auto records = dir / kObservedRecordsFile;
  const auto encounters = dir / kObservedEncountersFile;
  auto r = open_input(records);
  auto e = open_input(encounters);
  return read_observed(r, records.string(), e, encounters.string());
}

bool has_trajectories(const fs::path& dir) {
  return fs::exists(dir / kTrajectoriesFile) && fs::exists(dir / kEncountersFile);
}

}  // namespace pregtte
